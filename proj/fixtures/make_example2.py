"""Generate the two degree-5 rational sub-patches used by the C1 pipeline.

A single rational patch S is defined on the planar triangle
W1 = (2,-1), W2 = (0,1), W3 = (0,0) and split along the segment from
(0,0) to (1,0) into
  Y on V1 = (1,0), V2 = (0,1), V3 = (0,0)
  R on U1 = (2,-1), U2 = (1,0), U3 = (0,0)
by evaluating the blossom of S in homogeneous coordinates.
"""

import json
import math
import random

N = 5


def indices(n):
    return [(k1, k2) for k1 in range(n + 1) for k2 in range(n + 1 - k1)]


def blossom(net, args):
    # net: {(k1, k2): homogeneous point}; args: n barycentric triples
    cur = dict(net)
    n = len(args)
    for r, (a, b, c) in enumerate(args):
        deg = n - r - 1
        cur = {
            (k1, k2): [a * p + b * q + c * s for p, q, s in zip(cur[(k1 + 1, k2)], cur[(k1, k2 + 1)], cur[(k1, k2)])]
            for k1, k2 in indices(deg)
        }
    return cur[(0, 0)]


def main():
    rng = random.Random(2024)
    W = [(2.0, -1.0), (0.0, 1.0), (0.0, 0.0)]
    net = {}
    for k1, k2 in indices(N):
        k3 = N - k1 - k2
        x = (k1 * W[0][0] + k2 * W[1][0] + k3 * W[2][0]) / N
        y = (k1 * W[0][1] + k2 * W[1][1] + k3 * W[2][1]) / N
        z = 0.8 * math.sin(1.3 * x + 0.4) * math.cos(1.1 * y) + 0.1 * rng.uniform(-1, 1)
        w = rng.uniform(0.6, 1.8)
        net[(k1, k2)] = [w * x, w * y, w * z, w]

    subs = {
        "Y": [(0.5, 0.5, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0)],
        "R": [(1.0, 0.0, 0.0), (0.5, 0.5, 0.0), (0.0, 0.0, 1.0)],
    }
    for name, (P1, P2, P3) in subs.items():
        entries = []
        for k1, k2 in indices(N):
            h = blossom(net, [P1] * k1 + [P2] * k2 + [P3] * (N - k1 - k2))
            entries.append({"k": [k1, k2], "p": [h[0] / h[3], h[1] / h[3], h[2] / h[3]], "w": h[3]})
        with open(f"example2_{name}.json", "w") as f:
            f.write('{\n  "degree": 5,\n  "dim": 3,\n  "points": [\n')
            f.write(",\n".join("    " + json.dumps(e) for e in entries))
            f.write("\n  ]\n}\n")


if __name__ == "__main__":
    main()
