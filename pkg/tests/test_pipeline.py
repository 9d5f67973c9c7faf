import json
import logging

import pandas as pd
import pytest

from app.core.exceptions import ArtifactIOException, BaseAppException, ValidationException
from app.core.pipeline import (
    CsvArtifactLoader,
    JsonArtifactLoader,
    JsonDocumentExtractor,
    Pipeline,
    manifest_sidecar,
)
from app.core.validation import MatrixValidator
from app.models import ArtifactFactory, MatrixDocument, RunManifest
from app.services.tensorcore import SparseComplexMatrix


@pytest.fixture
def manifest():
    return RunManifest(subcommand="decompose", version="0.0.0", config={"basis": "pauli"})


def test_pipeline_chains_steps():
    result = (
        Pipeline("soma")
        .add_step(lambda: 2)
        .add_step(lambda x: x * 10, "multiplica")
        .add_step(lambda x: x + 1)
        .execute()
    )
    assert result == 21


def test_named_first_step_takes_no_arguments():
    result = Pipeline("nomeado").add_step(lambda: [3, 1, 2], "gera").add_step(sorted, "ordena").execute()
    assert result == [1, 2, 3]


def test_empty_pipeline_returns_none():
    assert Pipeline().execute() is None


def test_pipeline_wraps_unexpected_errors():
    def broken(_):
        raise KeyError("coluna")

    with pytest.raises(BaseAppException):
        Pipeline().add_step(lambda: 1).add_step(broken).execute()


def test_extractor_reads_and_validates(write_json):
    path = write_json("m.json", {"rows": 2, "cols": 2, "entries": [[0, 1, 1.5, 0.0]]})
    document = JsonDocumentExtractor(path, MatrixDocument, MatrixValidator()).extract()

    assert ArtifactFactory.matrix_from_document(document).entries == [(0, 1, 1.5 + 0j)]


def test_extractor_logs_non_blocking_issues(write_json, caplog):
    path = write_json("m.json", {"rows": 2, "cols": 2, "entries": [[0, 1, 1.5, 0.0], [1, 0, 1e-14, 0.0]]})
    with caplog.at_level(logging.WARNING):
        document = JsonDocumentExtractor(path, MatrixDocument, MatrixValidator()).extract()

    assert ArtifactFactory.matrix_from_document(document).entries == [(0, 1, 1.5 + 0j)]
    assert any("tolerância de zero" in record.getMessage() for record in caplog.records)


def test_extractor_reports_semantic_errors(write_json):
    path = write_json("m.json", {"rows": 2, "cols": 2, "entries": [[2, 0, 1.0, 0.0]]})
    with pytest.raises(ValidationException) as exc_info:
        JsonDocumentExtractor(path, MatrixDocument, MatrixValidator()).extract()
    assert "entries[0].row" in exc_info.value.field_errors


def test_extractor_reports_schema_errors(write_json):
    path = write_json("m.json", {"rows": 2, "entries": [], "extra": 1})
    with pytest.raises(ValidationException) as exc_info:
        JsonDocumentExtractor(path, MatrixDocument).extract()
    fields = set(exc_info.value.field_errors)
    assert "cols" in fields
    assert "extra" in fields


def test_extractor_missing_file(tmp_path):
    with pytest.raises(ArtifactIOException):
        JsonDocumentExtractor(tmp_path / "nada.json", MatrixDocument).extract()


def test_extractor_invalid_json(tmp_path):
    path = tmp_path / "m.json"
    path.write_text("{rows: 2", encoding="utf-8")
    with pytest.raises(BaseAppException) as exc_info:
        JsonDocumentExtractor(path, MatrixDocument).extract()
    assert exc_info.value.exit_code == 1


def test_json_loader_embeds_manifest(tmp_path, manifest):
    doc = ArtifactFactory.matrix_to_document(SparseComplexMatrix.identity(2), meta={"order": 1})
    path = tmp_path / "out" / "m.json"
    JsonArtifactLoader(path, manifest).load(doc)

    payload = json.loads(path.read_text(encoding="utf-8"))
    assert payload["meta"] == {"order": 1}
    assert payload["manifest"]["subcommand"] == "decompose"
    assert payload["manifest"]["wall_clock_ms"] >= 0
    assert payload["entries"] == [[0, 0, 1.0, 0.0], [1, 1, 1.0, 0.0]]
    assert path.read_text(encoding="utf-8").endswith("\n")


def test_json_output_is_stable_apart_from_manifest(tmp_path, manifest):
    doc = ArtifactFactory.matrix_to_document(SparseComplexMatrix.identity(4))
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    JsonArtifactLoader(first, manifest).load(doc)
    JsonArtifactLoader(second, manifest).load(doc)

    a = json.loads(first.read_text(encoding="utf-8"))
    b = json.loads(second.read_text(encoding="utf-8"))
    a_manifest = RunManifest.model_validate(a.pop("manifest"))
    b_manifest = RunManifest.model_validate(b.pop("manifest"))
    assert a == b
    assert a_manifest.stable_dict() == b_manifest.stable_dict()


def test_csv_loader_writes_sidecar(tmp_path, manifest):
    table = pd.DataFrame({"N": [1, 2], "max_error": [0.1, 1e-3]})
    path = tmp_path / "table.csv"
    CsvArtifactLoader(path, manifest).load(table)

    assert path.read_text(encoding="utf-8") == "N,max_error\n1,0.1\n2,0.001\n"
    sidecar = manifest_sidecar(path)
    assert sidecar.name == "table.csv.manifest.json"
    assert json.loads(sidecar.read_text(encoding="utf-8"))["subcommand"] == "decompose"
