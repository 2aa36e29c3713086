"""
Walking an extended neighbourhood chain
=======================================

A plain kNN looks at the k points closest to the query.  The chain rule
instead hops: first to the point nearest the query, then to the point
nearest *that* one, and so on.  On a curved class boundary the chain can
follow the shape of the data.
"""

import numpy as np

from oexnrule import Dataset, exnrule_chain, exnrule_predict, knn_predict

# two interleaved arcs
t = np.linspace(0, np.pi, 12)
upper = np.c_[np.cos(t), np.sin(t)]
lower = np.c_[1 - np.cos(t), 0.4 - np.sin(t)]
train = Dataset(np.r_[upper, lower], np.r_[np.zeros(12), np.ones(12)])

x0 = np.array([0.95, 0.05])

chain = exnrule_chain(train.features, range(train.n), x0, k=5, labels=train.labels)
print("chain rows     :", chain.indices.tolist())
print("chain labels   :", chain.labels.tolist())
print("step distances :", np.round(chain.step_distances, 3).tolist())

# the first step is always the nearest neighbour of the query
d0 = np.linalg.norm(train.features - x0, axis=1)
assert chain.indices[0] == d0.argmin()

print("chain vote :", exnrule_predict(train, x0, k=5))
print("kNN vote   :", knn_predict(train, x0, k=5))
