"""Ranked-run evaluation, worked by hand: AP, interpolated precision, nDCG.

One small ranking is scored step by step so every number in the report is
reproducible by hand, then two questions are aggregated the way batch
evaluation does it (arithmetic means over judged questions).
"""

from centroid_ir import (RankedRun, average_precision, evaluate,
                         interpolated_precision_curve, ndcg_at_k,
                         report_table)
from centroid_ir.evaluation import RECALL_LEVELS

ranking = ["d1", "d2", "d3"]
relevant = {"d1", "d3"}
print(f"ranking: {ranking}   relevant: {sorted(relevant)}\n")

# Average precision: precision at each rank where a relevant document
# appears, averaged over ALL relevant documents (missing ones count 0).
#   rank 1 -> hit, precision 1/1
#   rank 3 -> hit, precision 2/3
#   AP = (1 + 2/3) / 2 = 0.8333
print(f"AP = {average_precision(ranking, relevant):.5f} (by hand: (1 + 2/3)/2)")

# Interpolated precision at recall r takes the best precision achieved at
# any recall >= r.  The two hits sit at (recall, precision) = (0.5, 1.0)
# and (1.0, 0.6667), so the curve holds 1.0 through recall 0.5 and 0.6667
# afterwards.
curve = interpolated_precision_curve(ranking, relevant)
print("\ninterpolated precision at the 11 standard recall levels:")
for level, value in zip(RECALL_LEVELS, curve):
    bar = "#" * int(round(40 * value))
    print(f"  r={level:.1f}  {value:.4f} {bar}")
print(f"AIP (mean of the 11 values) = {curve.mean():.5f}")

# Binary nDCG: hits discounted by 1/log2(rank+1), normalized by an ideal
# ranking that fronts all relevant documents.
#   DCG  = 1/log2(2) + 0 + 1/log2(4) = 1.5
#   IDCG = 1/log2(2) + 1/log2(3)     = 1.63093
print(f"\nnDCG@3 = {ndcg_at_k(ranking, relevant, 3):.5f} (by hand: 1.5/1.63093)")

# ---------------------------------------------------------------------------
# Aggregation over a batch: one well-answered question, one question whose
# documents were never retrieved.  Judged-but-missing questions score zero
# rather than being skipped, so empty results honestly drag the mean down.
# ---------------------------------------------------------------------------
run = RankedRun(tag="demo", per_question={
    "good": [("d1", 0.9), ("d2", 0.8), ("d3", 0.7)],
})
qrels = {"good": {"d1", "d3"}, "missing": {"d9"}}
report = evaluate(run, qrels, k_list=(3, 10))
print("\nbatch report over two judged questions (one absent from the run):\n")
print(report_table(report))
