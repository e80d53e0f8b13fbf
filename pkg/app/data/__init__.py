from app.data.datasets import Dataset, NormStats, SplitDataset
from app.data.digits import load_digits, parse_digits
from app.data.generators import DEFAULT_NOISE_SD, generate
from app.data.preprocessing import fit_normalize, split, write_dataset_csv
from app.data.problems import CATALOGUE, DatasetKind, ProblemSpec, get_problem, list_problems

__all__ = [
    "CATALOGUE",
    "DEFAULT_NOISE_SD",
    "Dataset",
    "DatasetKind",
    "NormStats",
    "ProblemSpec",
    "SplitDataset",
    "fit_normalize",
    "generate",
    "get_problem",
    "list_problems",
    "load_digits",
    "parse_digits",
    "split",
    "write_dataset_csv",
]
