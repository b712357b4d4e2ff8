"""Tab-separated export of matrices and result tables."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

import pandas as pd

from processing.model.types import CountMatrix, DEResultTable, EnrichmentResultTable, GeneSetDatabase, PhenotypeLabels
from processing.preprocess.conversion import ConversionReport
from processing.preprocess.normalization import NormalizationFactors
from processing.preprocess.transform import TransformedMatrix

logger = logging.getLogger(__name__)


@dataclass
class TSVExportConfig:
    """Configuration for TSV export."""

    float_format: str = "%.12g"
    na_rep: str = ""


class TSVWriter:
    """
    Writes pandas frames as TSV with a fixed float format and LF line endings,
    so identical results always give identical bytes.
    """

    def __init__(self, config: TSVExportConfig | None = None):
        self.config = config or TSVExportConfig()

    def to_text(self, frame: pd.DataFrame, index: bool = False) -> str:
        return frame.to_csv(
            sep="\t",
            index=index,
            float_format=self.config.float_format,
            na_rep=self.config.na_rep,
            lineterminator="\n",
        )

    def write_frame(self, frame: pd.DataFrame, path: str | Path, index: bool = False) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as f:
            f.write(self.to_text(frame, index=index))
        logger.debug(f"Wrote {path} ({len(frame)} rows)")
        return path

    def write_count_matrix(self, cm: CountMatrix, path: str | Path) -> Path:
        frame = pd.DataFrame(cm.counts, columns=list(cm.sample_ids))
        frame.insert(0, "gene_id", list(cm.gene_ids))
        return self.write_frame(frame, path)

    def write_transformed(self, tm: TransformedMatrix, path: str | Path) -> Path:
        return self.write_frame(tm.to_frame(), path)

    def write_factors(self, nf: NormalizationFactors, path: str | Path) -> Path:
        frame = pd.DataFrame(
            {
                "sample_id": list(nf.sample_ids),
                "library_size": nf.library_sizes,
                "factor": nf.factors,
                "effective_library_size": nf.effective_library_sizes,
                "method": nf.method.value,
            }
        )
        return self.write_frame(frame, path)

    def write_de_table(self, de: DEResultTable, path: str | Path) -> Path:
        return self.write_frame(de.to_frame(), path)

    def write_results(self, table: EnrichmentResultTable, path: str | Path) -> Path:
        return self.write_frame(table.to_frame(), path)

    def write_conversion_report(self, report: ConversionReport, path: str | Path) -> Path:
        return self.write_frame(report.to_frame(), path)

    def write_matrix(self, frame: pd.DataFrame, path: str | Path) -> Path:
        """Write a labelled square matrix (row labels in the first column)."""
        return self.write_frame(frame, path, index=True)

    def write_phenotype(self, ph: PhenotypeLabels, path: str | Path) -> Path:
        frame = pd.DataFrame({"sample_id": list(ph.sample_ids), "label": ph.labels.astype(int)})
        return self.write_frame_without_header(frame, path)

    def write_lengths(self, lengths: dict[str, float], path: str | Path) -> Path:
        frame = pd.DataFrame({"gene_id": list(lengths), "length": list(lengths.values())})
        return self.write_frame(frame, path)

    def write_frame_without_header(self, frame: pd.DataFrame, path: str | Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        text = frame.to_csv(sep="\t", index=False, header=False, lineterminator="\n")
        path.write_text(text, encoding="utf-8", newline="")
        return path

    def write_gmt(self, db: GeneSetDatabase, path: str | Path) -> Path:
        """Write gene sets as GMT: name, description, then one member per field."""
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        lines = ["\t".join([s.name, s.description or "na", *s.members]) for s in db]
        path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="")
        logger.debug(f"Wrote {path} ({len(db)} gene sets)")
        return path
