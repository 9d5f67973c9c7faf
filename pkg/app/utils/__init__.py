"""
Utilitários de análise das tabelas produzidas pelos estudos.
"""
