from .experiment import (ExperimentError, ExperimentResult, ExperimentSpec, load_spec, run_one,
                         run_replications, spec_from_dict, summarize_records)
from .summary import ReplicationSummary, summarize
