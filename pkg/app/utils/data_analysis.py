import numpy as np
import pandas as pd
from typing import Dict, Sequence


def log_slope(x: Sequence[float], y: Sequence[float]) -> float:
    """
    Least-squares slope of log(y) against x.

    Args:
        x: Abscissae (e.g. qubit counts)
        y: Positive values (e.g. gradient variances)

    Returns:
        float: Fitted slope; negative means exponential decay
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 2:
        return 0.0
    slope, _ = np.polyfit(x, np.log(y), 1)
    return float(slope)


class StudyTableAnalyzer:
    """
    Utility class for inspecting the tables produced by the studies
    (convergence, term counts, variance scans, training traces).
    """

    @staticmethod
    def is_monotone_decreasing(values: Sequence[float], rtol: float = 0.0) -> bool:
        """
        Check that each value is not larger than the previous one.

        Args:
            values: Sequence to check
            rtol: Relative slack allowed between consecutive values

        Returns:
            bool: True when the sequence never increases beyond the slack
        """
        arr = np.asarray(values, dtype=float)
        if arr.size < 2:
            return True
        return bool(np.all(arr[1:] <= arr[:-1] * (1.0 + rtol)))

    @staticmethod
    def convergence_summary(df: pd.DataFrame) -> Dict[str, float]:
        """
        Summarize a convergence table (columns N, max_error).

        Returns:
            Dict: best order, best error and the error reduction factor
            between the first and the last finite rows
        """
        finite = df[np.isfinite(df["max_error"])]
        if finite.empty:
            return {"best_order": float("nan"), "best_error": float("inf"), "reduction": float("nan")}
        best = finite.loc[finite["max_error"].idxmin()]
        first, last = finite["max_error"].iloc[0], finite["max_error"].iloc[-1]
        return {
            "best_order": int(best["N"]),
            "best_error": float(best["max_error"]),
            "reduction": float(first / last) if last > 0 else float("inf"),
        }

    @staticmethod
    def term_savings(df: pd.DataFrame) -> pd.DataFrame:
        """
        Add the Pauli-minus-Sigma term difference to a term-count table.

        Args:
            df: Table with pauli_terms and sigma_terms columns

        Returns:
            pd.DataFrame: Copy with an extra 'difference' column
        """
        out = df.copy()
        out["difference"] = out["pauli_terms"] - out["sigma_terms"]
        return out

    @staticmethod
    def trace_trend(trace: Sequence[float], window: int = 10) -> float:
        """
        Mean of the last window minus mean of the first window.

        A negative value means the trace decreases in trend.
        """
        arr = np.asarray(trace, dtype=float)
        window = max(1, min(window, arr.size))
        return float(arr[-window:].mean() - arr[:window].mean())
