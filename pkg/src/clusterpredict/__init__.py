"""Cluster-then-predict sentiment classification.

Short labeled texts are turned into bag-of-words count vectors, the training
documents are partitioned with K-means, and one classifier is trained per
cluster. Unseen documents are routed to the nearest centroid and scored by
that cluster's classifier.
"""

__version__ = "0.1.0"
