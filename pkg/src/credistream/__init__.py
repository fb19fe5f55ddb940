"""Stream analytics for social-media credibility.

Scores posts and accounts with weighted formulas and a trainable feedforward
classifier, groups near-duplicate posts with four similarity distances,
classifies sentiment with lexicon overrides, and aggregates results into
per-region statistics, monitors, clusters and heatmaps.
"""

__version__ = "0.1.0"
