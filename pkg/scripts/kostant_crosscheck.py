"""Compare Kostant predictions with the brute-force engine on simple-group fixtures.

For each fixture, decompose gl(V)/g into irreducibles, report the Kostant
weight of each component with its grade and predicted cohomology degree, and
print the engine's H^{p,1} next to it.
"""

from projinv.kostant import build_root_system, perp_components, predict
from projinv.models import grassmannian2, quadric
from projinv.rigidity import rigidity_report

CASES = [
    (grassmannian2(5), "A", 4, 2, (0, 1, 0, 0)),
    (grassmannian2(4), "A", 3, 2, (0, 1, 0)),
    (quadric(4, 4), "A", 3, 2, (0, 1, 0)),
    (quadric(3, 3), "B", 2, 1, (1, 0)),
]


def main() -> None:
    for fx, kind, rank, node, module in CASES:
        rs = build_root_system(kind, rank)
        rep = rigidity_report(fx.graph)
        h = {p: rep.h_dims[p] for p in (1, 2, 3)}
        print(f"{fx.label}: {rs.label}, node {node}, V = {module}; engine H = {h}")
        for comp in perp_components(rs, module):
            pred = predict(rs, comp, node)
            print(f"    component {comp} (dim {pred.dimension}): Kostant weight {pred.weight}, "
                  f"grade {pred.grade}, H-degree {pred.cohomology_degree}, Levi dim {pred.levi_dim}")


if __name__ == "__main__":
    main()
