"""
Módulo de documentos (schemas pydantic dos artefatos JSON).

Este módulo contém:
- Documentos de matriz, sistema, termos, circuitos e relatórios
- O manifesto de execução
- Fábricas de conversão documento <-> domínio
"""

# Re-exportar modelos e fábricas para facilitar importação
from app.models.base import ArtifactBase, RunManifest
from app.models.matrix import CoefficientDocument, MatrixBody, MatrixDocument, SystemDocument
from app.models.terms import TermDocument, TermsDocument
from app.models.circuit import CircuitDocument, CircuitsDocument
from app.models.reports import BlockReport, CircuitCheck, EncodingDocument, VerifyReport

# Exportar fábricas
from app.models.factory import ArtifactFactory, ModelFactory
