"""
Scoring agreement between partitions and between band graphs
============================================================

Partition metrics (NMI, ARI, VI) score how much two community assignments
agree; the Jensen-Shannon spectral distance scores how much two weighted
graphs differ as whole objects.
"""

import numpy as np

from mfnet.metrics import ari, band_similarity, js_distance, nmi, vi
from mfnet.modularity import ModularityParams, leiden_maximize
from mfnet.synth import PlantedSpec, planted_multilayer, spanning_blueprint

blueprint = spanning_blueprint(20, 3, 4)
net, truth = planted_multilayer(
    PlantedSpec(3, 20, blueprint, mu_in=0.7, mu_out=0.3, spread=0.1,
                seed=9))

# two detections with different seeds and its score against the truth
params = ModularityParams(1.0, 0.3)
p1, _ = leiden_maximize(net, params, seed=1)
p2, _ = leiden_maximize(net, params, seed=2)
for name, a, b in (("run1 vs run2", p1, p2), ("run1 vs truth", p1, truth)):
    print("%s: NMI %.3f  ARI %.3f  VI %.3f bits"
          % (name, nmi(a, b), ari(a, b), vi(a, b)))

# the same comparison split out per layer
print("\nper-layer agreement between run1 and truth:")
for label, l_nmi, l_ari, l_vi in band_similarity(p1, truth, net):
    print("  %s: NMI %.3f  ARI %.3f  VI %.3f" % (label, l_nmi, l_ari, l_vi))

# spectral distance between the per-layer graphs: layers drawn from the
# same planted pattern sit close together, an independent graph does not
rng = np.random.default_rng(0)
other = rng.uniform(size=(20, 20))
other = (other + other.T) / 2.0
np.fill_diagonal(other, 0.0)
a0, a1 = net.block(0, 0), net.block(1, 1)
print("\njs distance layer0 vs layer1: %.3f" % js_distance(a0, a1))
print("js distance layer0 vs random graph: %.3f" % js_distance(a0, other))
