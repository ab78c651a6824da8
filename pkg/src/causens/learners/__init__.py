"""Base causal learners. Each maps a window and a config to a StrengthMatrix."""
from .ccm import ccm_matrix
from .granger import granger_matrix
from .pcmci import pcmci_matrix
from .transfer_entropy import nte_matrix

LEARNERS = {
    "GC": granger_matrix,
    "NTE": nte_matrix,
    "PCMCI": pcmci_matrix,
    "CCM": ccm_matrix,
}
LEARNER_NAMES = tuple(LEARNERS)
