"""Not-all-equal 3SAT: DIMACS parsing, checking and a brute-force oracle.

Literals are signed DIMACS integers; a clause is a triple of them.  Repeated
literals inside a clause are legal.  A clause is NAE-satisfied when it has at
least one true and at least one false literal.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Optional, Tuple

from .errors import CapacityError, FormulaParseError, ValidationError

Clause = Tuple[int, int, int]
Assignment = Dict[int, bool]

BRUTE_FORCE_VAR_LIMIT = 30


@dataclass(frozen=True)
class Nae3SatFormula:
    num_vars: int
    clauses: Tuple[Clause, ...]

    def __post_init__(self):
        if self.num_vars < 0:
            raise ValidationError("negative variable count")
        for clause in self.clauses:
            if len(clause) != 3:
                raise ValidationError(f"clause {clause} does not have exactly three literals")
            for lit in clause:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise ValidationError(f"literal {lit} out of range in {clause}")


def parse_formula(text: str) -> Nae3SatFormula:
    """Parse DIMACS CNF text, requiring exactly three literals per clause line."""
    num_vars = None
    num_clauses = None
    clauses = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            if num_vars is not None:
                raise FormulaParseError("duplicate header", lineno)
            parts = line.split()
            if len(parts) != 4 or parts[0] != "p" or parts[1] != "cnf":
                raise FormulaParseError(f"malformed header {line!r}", lineno)
            try:
                num_vars, num_clauses = int(parts[2]), int(parts[3])
            except ValueError:
                raise FormulaParseError(f"malformed header {line!r}", lineno)
            continue
        if num_vars is None:
            raise FormulaParseError("clause before header", lineno)
        try:
            lits = [int(tok) for tok in line.split()]
        except ValueError:
            raise FormulaParseError(f"non-integer token in {line!r}", lineno)
        if not lits or lits[-1] != 0:
            raise FormulaParseError("clause line must end with 0", lineno)
        lits = lits[:-1]
        if len(lits) != 3 or any(l == 0 for l in lits):
            raise FormulaParseError(f"clause has {len(lits)} literals, expected 3", lineno)
        for lit in lits:
            if abs(lit) > num_vars:
                raise FormulaParseError(f"variable {abs(lit)} exceeds declared {num_vars}", lineno)
        clauses.append(tuple(lits))
    if num_vars is None:
        raise FormulaParseError("missing header", 1)
    if num_clauses is not None and num_clauses != len(clauses):
        raise FormulaParseError(
            f"header declares {num_clauses} clauses, found {len(clauses)}", 1
        )
    return Nae3SatFormula(num_vars, tuple(clauses))


def format_formula(formula: Nae3SatFormula) -> str:
    lines = [f"p cnf {formula.num_vars} {len(formula.clauses)}"]
    for clause in formula.clauses:
        lines.append(" ".join(str(l) for l in clause) + " 0")
    return "\n".join(lines) + "\n"


def literal_value(lit: int, assignment: Assignment) -> bool:
    return assignment[abs(lit)] if lit > 0 else not assignment[abs(lit)]


def check_nae(formula: Nae3SatFormula, assignment: Assignment) -> bool:
    """True iff every clause has at least one true and one false literal."""
    for var in range(1, formula.num_vars + 1):
        if var not in assignment:
            raise ValidationError(f"assignment misses variable {var}")
    for clause in formula.clauses:
        values = [literal_value(l, assignment) for l in clause]
        if all(values) or not any(values):
            return False
    return True


def solve_nae_bruteforce(formula: Nae3SatFormula) -> Optional[Assignment]:
    """Lexicographically first NAE-satisfying assignment, or None.

    Variable 1 is most significant and False < True, so assignments are
    scanned in the order 00..0, 00..1, ...
    """
    n = formula.num_vars
    if n > BRUTE_FORCE_VAR_LIMIT:
        raise CapacityError(f"{n} variables exceed brute-force limit {BRUTE_FORCE_VAR_LIMIT}")
    for bits in range(1 << n):
        assignment = {i: bool((bits >> (n - i)) & 1) for i in range(1, n + 1)}
        if check_nae(formula, assignment):
            return assignment
    return None


def format_assignment(assignment: Assignment) -> str:
    """DIMACS solution line, e.g. "v 1 -2 3 0"."""
    lits = [var if value else -var for var, value in sorted(assignment.items())]
    return "v " + " ".join(str(l) for l in lits) + " 0\n"


def parse_assignment(text: str) -> Assignment:
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or not line.startswith("v"):
            continue
        try:
            lits = [int(tok) for tok in line[1:].split()]
        except ValueError:
            raise FormulaParseError("non-integer token in solution line", lineno)
        if not lits or lits[-1] != 0:
            raise FormulaParseError("solution line must end with 0", lineno)
        return {abs(l): l > 0 for l in lits[:-1]}
    raise FormulaParseError("no solution line found", 1)
