"""Central-difference verification of analytic gradients, per parameter block."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping

from .ops import Param


@dataclass
class BlockReport:
    name: str
    size: int
    max_rel_err: float
    worst_index: int
    n_failed: int

    @property
    def passed(self) -> bool:
        return self.n_failed == 0

    def line(self) -> str:
        status = "pass" if self.passed else "FAIL"
        return (f"{status}  {self.name:<16s} entries={self.size:<5d} "
                f"max_rel_err={self.max_rel_err:.3e}  worst_entry={self.worst_index}")


@dataclass
class GradCheckReport:
    eps: float
    tol: float
    blocks: list[BlockReport] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(b.passed for b in self.blocks)

    def lines(self) -> list[str]:
        out = [b.line() for b in self.blocks]
        verdict = "all blocks pass" if self.passed else (
            f"{sum(not b.passed for b in self.blocks)} block(s) FAIL")
        out.append(f"gradcheck eps={self.eps:g} tol={self.tol:g}: {verdict}")
        return out


def grad_check(loss_fn: Callable[[], float], params: Mapping[str, Param],
               eps: float = 1e-5, tol: float = 1e-4) -> GradCheckReport:
    """Compare analytic gradients against central finite differences.

    ``loss_fn`` must be deterministic, return the scalar loss, and accumulate
    d loss / d param into each ``Param.grad``. Grads are zeroed here before
    the analytic call; an entry fails when

        |analytic - numeric| / max(1, |analytic| + |numeric|) > tol.
    """
    for p in params.values():
        p.zero_grad()
    loss_fn()
    analytic = {name: p.grad.copy() for name, p in params.items()}
    report = GradCheckReport(eps=eps, tol=tol)
    for name, p in params.items():
        flat = p.value.flat  # writes through regardless of memory layout
        ana = analytic[name].ravel()
        size = p.value.size
        max_err = 0.0
        worst = 0
        failed = 0
        for k in range(size):
            orig = flat[k]
            flat[k] = orig + eps
            f_plus = loss_fn()
            flat[k] = orig - eps
            f_minus = loss_fn()
            flat[k] = orig
            numeric = (f_plus - f_minus) / (2.0 * eps)
            rel = abs(ana[k] - numeric) / max(1.0, abs(ana[k]) + abs(numeric))
            if rel > max_err:
                max_err, worst = rel, k
            if rel > tol:
                failed += 1
        report.blocks.append(BlockReport(name=name, size=size,
                                         max_rel_err=max_err, worst_index=worst,
                                         n_failed=failed))
    for p in params.values():
        p.zero_grad()  # the finite-difference calls polluted the grads
    return report
