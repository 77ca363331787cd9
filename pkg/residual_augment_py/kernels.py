"""
Compiled CART kernels

Trees are stored as flat node arrays: feature (-1 marks a leaf), threshold,
left, right (child indices local to the tree) and value (leaf mean for
regression, class index for classification). A sample goes left when
x[feature] <= threshold.
"""
import numpy as np
from numba import njit

TASK_REGRESSION = 0
TASK_CLASSIFICATION = 1

# Relative slack below which a gain counts as no improvement, and within which two gains tie.
GAIN_TOLERANCE = 1e-12

_XS_MULT = np.uint64(2685821657736338717)


@njit(cache=True, nogil=True)
def _next_random(state):
    # xorshift64*
    x = state[0]
    x ^= x >> np.uint64(12)
    x ^= x << np.uint64(25)
    x ^= x >> np.uint64(27)
    state[0] = x
    return x * _XS_MULT


@njit(cache=True, nogil=True)
def _random_below(state, bound):
    return np.int64(_next_random(state) % np.uint64(bound))


@njit(cache=True, nogil=True)
def build_tree(X, y, samples, task, n_classes, max_features, max_depth, min_samples_split, seed):
    """
    Grow one CART tree on the rows listed in samples (duplicates allowed)

    Nodes with fewer than min_samples_split rows, or at depth max_depth (negative: no cap), become leaves.

    Returns (feature, threshold, left, right, value) arrays trimmed to the node count.
    """
    n_total = samples.shape[0]
    n_features = X.shape[1]
    capacity = 2 * n_total + 1

    feature = np.full(capacity, -1, dtype=np.int64)
    threshold = np.zeros(capacity, dtype=np.float64)
    left = np.full(capacity, -1, dtype=np.int64)
    right = np.full(capacity, -1, dtype=np.int64)
    value = np.zeros(capacity, dtype=np.float64)

    idx = samples.copy()
    buf = np.empty(n_total, dtype=np.int64)
    xs = np.empty(n_total, dtype=np.float64)
    features = np.arange(n_features)
    counts = np.zeros(max(n_classes, 1), dtype=np.float64)
    left_counts = np.zeros(max(n_classes, 1), dtype=np.float64)
    right_counts = np.zeros(max(n_classes, 1), dtype=np.float64)
    rng = np.empty(1, dtype=np.uint64)
    rng[0] = seed | np.uint64(1)

    stack_node = np.empty(capacity, dtype=np.int64)
    stack_start = np.empty(capacity, dtype=np.int64)
    stack_end = np.empty(capacity, dtype=np.int64)
    stack_depth = np.empty(capacity, dtype=np.int64)
    top = 1
    stack_node[0] = 0
    stack_start[0] = 0
    stack_end[0] = n_total
    stack_depth[0] = 0
    node_count = 1

    while top > 0:
        top -= 1
        node = stack_node[top]
        start = stack_start[top]
        end = stack_end[top]
        depth = stack_depth[top]
        n = end - start

        pure = True
        parent_sq = 0.0
        mean = 0.0
        tolerance = 0.0
        if task == TASK_REGRESSION:
            total = 0.0
            first = y[idx[start]]
            for i in range(start, end):
                v = y[idx[i]]
                total += v
                if v != first:
                    pure = False
            mean = total / n
            value[node] = mean
            sse = 0.0
            for i in range(start, end):
                d = y[idx[i]] - mean
                sse += d * d
            tolerance = GAIN_TOLERANCE * sse
        else:
            counts[:] = 0.0
            for i in range(start, end):
                counts[np.int64(y[idx[i]])] += 1.0
            best_class = 0
            for c in range(n_classes):
                if counts[c] > counts[best_class]:
                    best_class = c
                parent_sq += counts[c] * counts[c]
            value[node] = best_class
            pure = counts[best_class] == n
            tolerance = GAIN_TOLERANCE * n

        if n < min_samples_split or pure or (max_depth >= 0 and depth >= max_depth):
            continue

        best_gain = -1.0
        best_feature = -1
        best_threshold = 0.0
        visited = 0
        for j in range(n_features):
            if max_features < n_features:
                r = j + _random_below(rng, n_features - j)
                tmp = features[j]
                features[j] = features[r]
                features[r] = tmp
            f = features[j]

            for k in range(n):
                xs[k] = X[idx[start + k], f]
            order = np.argsort(xs[:n], kind="mergesort")
            if xs[order[0]] == xs[order[n - 1]]:
                continue
            visited += 1

            if task == TASK_REGRESSION:
                left_sum = 0.0
                for k in range(n - 1):
                    left_sum += y[idx[start + order[k]]] - mean
                    x_cur = xs[order[k]]
                    x_next = xs[order[k + 1]]
                    if x_next <= x_cur:
                        continue
                    n_left = k + 1
                    n_right = n - n_left
                    gain = left_sum * left_sum * n / (n_left * n_right)
                    if gain > best_gain + tolerance or (
                            abs(gain - best_gain) <= tolerance and best_feature >= 0 and f < best_feature):
                        best_gain = gain
                        best_feature = f
                        best_threshold = (x_cur + x_next) / 2.0
                        if best_threshold >= x_next:
                            best_threshold = x_cur
            else:
                left_counts[:] = 0.0
                for c in range(n_classes):
                    right_counts[c] = counts[c]
                left_sq = 0.0
                right_sq = parent_sq
                for k in range(n - 1):
                    c = np.int64(y[idx[start + order[k]]])
                    left_sq += 2.0 * left_counts[c] + 1.0
                    left_counts[c] += 1.0
                    right_sq -= 2.0 * right_counts[c] - 1.0
                    right_counts[c] -= 1.0
                    x_cur = xs[order[k]]
                    x_next = xs[order[k + 1]]
                    if x_next <= x_cur:
                        continue
                    n_left = k + 1
                    n_right = n - n_left
                    gain = left_sq / n_left + right_sq / n_right - parent_sq / n
                    if gain > best_gain + tolerance or (
                            abs(gain - best_gain) <= tolerance and best_feature >= 0 and f < best_feature):
                        best_gain = gain
                        best_feature = f
                        best_threshold = (x_cur + x_next) / 2.0
                        if best_threshold >= x_next:
                            best_threshold = x_cur

            if max_features < n_features and visited >= max_features:
                break

        if best_feature < 0 or best_gain <= tolerance:
            continue

        n_left = 0
        for i in range(start, end):
            s = idx[i]
            if X[s, best_feature] <= best_threshold:
                buf[n_left] = s
                n_left += 1
        pos = n_left
        for i in range(start, end):
            s = idx[i]
            if X[s, best_feature] > best_threshold:
                buf[pos] = s
                pos += 1
        for i in range(n):
            idx[start + i] = buf[i]

        feature[node] = best_feature
        threshold[node] = best_threshold
        left[node] = node_count
        right[node] = node_count + 1
        node_count += 2

        stack_node[top] = right[node]
        stack_start[top] = start + n_left
        stack_end[top] = end
        stack_depth[top] = depth + 1
        top += 1
        stack_node[top] = left[node]
        stack_start[top] = start
        stack_end[top] = start + n_left
        stack_depth[top] = depth + 1
        top += 1

    return (feature[:node_count].copy(), threshold[:node_count].copy(),
            left[:node_count].copy(), right[:node_count].copy(), value[:node_count].copy())


@njit(cache=True, nogil=True)
def predict_tree(feature, threshold, left, right, value, X):
    n = X.shape[0]
    out = np.empty(n, dtype=np.float64)
    for i in range(n):
        node = 0
        while feature[node] >= 0:
            if X[i, feature[node]] <= threshold[node]:
                node = left[node]
            else:
                node = right[node]
        out[i] = value[node]
    return out


@njit(cache=True, nogil=True)
def predict_forest(feature, threshold, left, right, value, offsets, X, task, n_classes):
    """
    Mean of tree outputs (regression) or majority class index, ties to the smallest (classification)

    Node arrays of all trees are concatenated; tree t occupies offsets[t]:offsets[t + 1].
    """
    n = X.shape[0]
    n_trees = offsets.shape[0] - 1
    out = np.zeros(n, dtype=np.float64)
    votes = np.zeros((n, max(n_classes, 1)), dtype=np.int64)
    for t in range(n_trees):
        base = offsets[t]
        for i in range(n):
            node = 0
            while feature[base + node] >= 0:
                if X[i, feature[base + node]] <= threshold[base + node]:
                    node = left[base + node]
                else:
                    node = right[base + node]
            if task == TASK_REGRESSION:
                out[i] += value[base + node]
            else:
                votes[i, np.int64(value[base + node])] += 1
    if task == TASK_REGRESSION:
        for i in range(n):
            out[i] = out[i] / n_trees
    else:
        for i in range(n):
            best = 0
            for c in range(n_classes):
                if votes[i, c] > votes[i, best]:
                    best = c
            out[i] = best
    return out
