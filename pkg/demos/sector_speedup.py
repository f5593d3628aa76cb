"""Time the sector-wise propagator against full diagonalization."""

from ultracold_jc.bench import benchmark
from ultracold_jc.hilbert import SpaceDims

for dims in (SpaceDims(32, 8), SpaceDims(64, 16)):
    print(benchmark(dims, n_times=200).line())
