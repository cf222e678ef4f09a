"""Signatures and synchronization maps, applied by hand.

A signature lists the block sizes of a synchronization event.  An ordered
tuple of distinct particle labels is split into consecutive blocks of those
sizes; the first label of each block is the leader and every other member
of the block jumps onto the leader's coordinate.
"""
import numpy as np

from syncsim import Signature, apply_sync, mean_shift, partition_tuple

pair = Signature((2,))
double_pair = Signature((2, 2))
triple = Signature((3,))

print("signature  size  groups  kappa (sum k_j^2 - k)")
for sig in (pair, double_pair, triple, Signature((2, 3))):
    print(
        f"{str(sig.parts):9}  {sig.size:4}  {sig.group_count:6}  {sig.kappa:5}"
    )

# A concrete event: particles labelled 1..6 sit at distinct coordinates.
coords = np.array([0.0, 10.0, 20.0, 30.0, 40.0, 50.0])
indices = (3, 5, 2, 6)  # drawn uniformly over ordered 4-tuples in practice

print("\ntuple", indices, "under signature (2, 2) splits into:")
for group in partition_tuple(double_pair, indices):
    print(f"  leader {group.leader} <- followers {group.followers}")

after = apply_sync(double_pair, indices, coords)
print("before:", coords)
print("after: ", after)

# Particle 5 adopted particle 3's coordinate and particle 6 adopted
# particle 2's; nobody else moved.  The sample mean moves by the total
# follower displacement over N:
print("mean shift:", mean_shift(double_pair, indices, coords))
print("check:     ", after.mean() - coords.mean())
