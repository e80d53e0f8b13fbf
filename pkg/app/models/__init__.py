from app.models.experiment_run import ExperimentRun

__all__ = ["ExperimentRun"]
