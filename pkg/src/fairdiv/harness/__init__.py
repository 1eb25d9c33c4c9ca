from .allocation import allocate_caps
from .bench import RunConfig, RunReport, load_config, parse_config, run_benchmark
from .datasets import generate_blobs, load_csv, write_csv
