"""
The six-qubit cluster channel
=============================

Build the shared channel from gates and look at its amplitudes, then check
that each party's half of it is maximally mixed.
"""
import numpy as np

from twoway_teleport import protocol as proto
from twoway_teleport import statevec as sv

# the channel is two Hadamards followed by a fan-out of CNOTs
print("gates: H(q1), H(q2),", ", ".join(f"CNOT({c}->{t})" for c, t in proto.CHANNEL_CNOTS))
channel = proto.build_channel()

# only four of the 64 basis states survive, all with amplitude 1/2
for ket, amp in channel.nonzero_terms().items():
    print(f"  |{ket}>  {amp.real:+.3f}")

# Alice keeps q1 and receives on q4 q6; Bob keeps q2 and receives on q3 q5
for name, qubits in (("Alice", proto.ALICE_CHANNEL), ("Bob", proto.BOB_CHANNEL)):
    rho = sv.partial_trace(channel, qubits)
    eig = np.linalg.eigvalsh(rho.entries)
    print(f"{name} {qubits}: purity {rho.purity():.3f}, rank {int((eig > 1e-12).sum())}")

# q1 and q2 are not entangled with each other; each is entangled with its partner's register
rho12 = sv.partial_trace(channel, ("q1", "q2"))
print("rho(q1, q2) == I/4:", np.allclose(rho12.entries, np.eye(4) / 4))
