from .histogram import DEFAULT_BINS, MeasureHistogram, bin_index, deposit, sample_counts, w1

__all__ = ["DEFAULT_BINS", "MeasureHistogram", "bin_index", "deposit", "sample_counts", "w1"]
