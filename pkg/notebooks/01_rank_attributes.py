"""
Ranking road-work attributes
============================

Turn pairwise importance judgments into weights, check their consistency,
and see how stable the ranking is when the judgments wobble.
"""

# %%
import numpy as np

from cclab.ahp import (
    build_comparison_matrix,
    calculate_consistency,
    calculate_priority_weights,
    load_judgments,
    run_dsa,
)
from cclab.workload import roadwork_judgments_path

attributes, judgments, cr_threshold = load_judgments(roadwork_judgments_path())
matrix = build_comparison_matrix(attributes, judgments)
print(np.array2string(matrix.entries, precision=2, suppress_small=True))

# %%
# The principal eigenvector gives the weights; the consistency ratio says
# whether the judgments hang together well enough to trust them.
weights = calculate_priority_weights(matrix)
diag = calculate_consistency(matrix, weights, cr_threshold)
print(f"lambda_max={diag.lambda_max:.4f}  CI={diag.ci:.4f}  RI={diag.ri:.4f}  CR={diag.cr:.4f}")

# %%
ranking = run_dsa(attributes, judgments, cr_threshold, perturbation=0.2, trials=500, seed=1)
for name in ranking.ordered():
    print(f"{ranking.ranks[name]}  {name:20s} {ranking.weights[name]:.4f}  stable {ranking.sensitivity[name]:.2f}")

# %%
# The top four form the admission set of the freshness cache.
print("admitted:", ranking.top(4))
