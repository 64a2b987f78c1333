"""Compare the compiled kernels with the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import sys

from pocs.bench import main

if __name__ == "__main__":
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=2000)
    sys.exit(main(repeat=ap.parse_args().repeat))
