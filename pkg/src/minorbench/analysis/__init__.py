"""Statistics, scaling fits and CSV reports over benchmark results."""
from .fits import FitResult, fit_logistic_success, fit_powerlaw, fit_sqrt_linear
from .report import ReportSummary, load_records, report
from .stats import (FriedmanResult, NoEvidence, RankTable, WilcoxonResult, bootstrap_median_ci,
                    friedman, holm, macro_average, rank_row, rank_with_failures_last, spearman,
                    wilcoxon, wilcoxon_holm, wilson_interval)

__all__ = [
    "FitResult", "fit_logistic_success", "fit_powerlaw", "fit_sqrt_linear", "ReportSummary",
    "load_records", "report", "FriedmanResult", "NoEvidence", "RankTable", "WilcoxonResult",
    "bootstrap_median_ci", "friedman", "holm", "macro_average", "rank_row",
    "rank_with_failures_last", "spearman", "wilcoxon", "wilcoxon_holm", "wilson_interval",
]
