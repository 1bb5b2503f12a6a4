"""Independent brute-force reference implementations used by the tests.

Everything here is written with plain loops, deliberately sharing no code
or vectorization strategy with the package, so agreement is meaningful.
"""

import math


def brute_average_precision(ranking, rel):
    """AP by rescanning the prefix at every relevant hit."""
    total = 0.0
    for i in range(len(ranking)):
        if ranking[i] in rel:
            hits = 0
            for j in range(i + 1):
                if ranking[j] in rel:
                    hits += 1
            total += hits / (i + 1)
    return total / len(rel)


def brute_ip_curve(ranking, rel):
    """Interpolated precision from (recall, precision) at every prefix."""
    points = []
    for i in range(1, len(ranking) + 1):
        hits = sum(1 for d in ranking[:i] if d in rel)
        points.append((hits / len(rel), hits / i))
    curve = []
    for tenth in range(11):
        level = tenth / 10
        best = 0.0
        for recall, precision in points:
            if recall >= level - 1e-12 and precision > best:
                best = precision
        curve.append(best)
    return curve


def brute_ndcg(ranking, rel, k):
    """Binary nDCG@k with literal sums."""
    dcg = 0.0
    for i, doc in enumerate(ranking[:k], start=1):
        if doc in rel:
            dcg += 1.0 / math.log2(i + 1)
    ideal = 0.0
    for i in range(1, min(k, len(rel)) + 1):
        ideal += 1.0 / math.log2(i + 1)
    return dcg / ideal


def brute_topk_cosine(doc_ids, vectors, query, k):
    """Rank all documents by cosine in float64; ties by ascending id.

    ``vectors`` is a list of per-document vectors (not necessarily
    normalized), ``query`` a vector.  Returns the top-k doc ids.
    """
    qnorm = math.sqrt(sum(x * x for x in query))
    if qnorm == 0.0:
        return []
    scored = []
    for doc_id, vec in zip(doc_ids, vectors):
        vnorm = math.sqrt(sum(x * x for x in vec))
        if vnorm == 0.0:
            score = 0.0
        else:
            score = sum(a * b for a, b in zip(vec, query)) / (vnorm * qnorm)
        scored.append((-score, doc_id))
    scored.sort()
    return [doc_id for _, doc_id in scored[:k]]


def route_point(tree, x):
    """Follow a tree's hyperplanes down to the leaf id owning point ``x``."""
    ref = tree.root
    while ref >= 0:
        proj = float(tree.normals[ref] @ x)
        side = 1 if proj >= float(tree.offsets[ref]) else 0
        ref = int(tree.children[ref][side])
    return -ref - 1
