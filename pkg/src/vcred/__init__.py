"""Privacy-preserving credentials over a bilinear group.

Commitments to document attributes, blind CL signatures, zero-knowledge
presentations with selective disclosure and range predicates, credential
update and epoch-based revocation.
"""

from .cl import cl_issue_on_commitment, cl_keygen, cl_randomize, cl_verify
from .commitment import vc_commit, vc_open, vc_setup, vc_update, vc_verify
from .errors import VcredError
from .group import setup
from .proofs import Predicate, prove_presentation, verify_presentation
from .protocol import (
    Authority,
    Criterion,
    Issuer,
    PredicateSpec,
    Reason,
    Verifier,
    Wallet,
    age_at_least,
    faith_ask,
    faith_auth,
    faith_issue,
    faith_show,
    faith_update,
    faith_verify_presentation,
)
from .revocation import prove_non_membership, publish_epoch, revoke, verify_non_membership
from .schemas import Document, builtin_schemas

__version__ = "0.1.0"

__all__ = [
    "Authority", "Criterion", "Document", "Issuer", "Predicate", "PredicateSpec", "Reason",
    "VcredError", "Verifier", "Wallet", "age_at_least", "builtin_schemas",
    "cl_issue_on_commitment", "cl_keygen", "cl_randomize", "cl_verify",
    "faith_ask", "faith_auth", "faith_issue", "faith_show", "faith_update",
    "faith_verify_presentation", "prove_non_membership", "prove_presentation",
    "publish_epoch", "revoke", "setup", "vc_commit", "vc_open", "vc_setup", "vc_update",
    "vc_verify", "verify_non_membership", "verify_presentation",
]
