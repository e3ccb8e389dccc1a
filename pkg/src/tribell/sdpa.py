"""Reader and writer for the SDPA sparse text format (".dat-s").

The SDPA problem convention is

    minimize    sum_i c_i x_i
    subject to  X = sum_i x_i F_i - F0,   X PSD (block diagonal),

while this package maximizes c.y subject to F0 + sum_i y_i F_i PSD.  The
translation is c_sdpa = -c, F0_sdpa = -F0, F_i unchanged; an SDPA solver's
optimal objective is then the negative of ours.  Both directions of the
translation live here so exported problems can be cross-checked against
independent solvers and their files re-imported.

Layout: optional comment lines ('"' or '*'), then the number of variables,
the number of blocks, the block sizes (negative size = diagonal block), the
objective row, and one "mat# block# i j value" entry per line, 1-indexed,
upper triangle only.  On input a diagonal block of size -k is split into k
one-dimensional blocks, which is the representation the solver uses anyway.
"""

from __future__ import annotations

import io
from collections import defaultdict

import numpy as np

from .errors import ParseError
from .solver import Block, StandardForm


def write_sdpa(p: StandardForm, comment: str = "") -> str:
    """Serialize a StandardForm (equalities are not representable and refuse)."""
    if p.A is not None:
        raise ValueError("SDPA export requires an equality-free problem; "
                         "eliminate equalities first")
    out = io.StringIO()
    if comment:
        for line in comment.splitlines():
            out.write(f'"{line}\n')
    m = p.c.size
    out.write(f"{m}\n")
    out.write(f"{len(p.blocks)}\n")
    out.write(" ".join(str(b.dim) for b in p.blocks) + "\n")
    out.write(" ".join(f"{-v:.17g}" for v in p.c) + "\n")
    for b_idx, blk in enumerate(p.blocks, start=1):
        f0 = blk.f0
        for i in range(blk.dim):
            for j in range(i, blk.dim):
                if f0[i, j] != 0.0:
                    out.write(f"0 {b_idx} {i + 1} {j + 1} {-f0[i, j]:.17g}\n")
        seen: dict[tuple[int, int, int], float] = defaultdict(float)
        for e in range(len(blk.var)):
            i, j = int(blk.rows[e]), int(blk.cols[e])
            if i > j:
                continue  # triplets carry both mirror images; emit upper only
            seen[(int(blk.var[e]), i, j)] += float(blk.vals[e])
        for (k, i, j), v in sorted(seen.items()):
            if v != 0.0:
                out.write(f"{k + 1} {b_idx} {i + 1} {j + 1} {v:.17g}\n")
    return out.getvalue()


def read_sdpa(text: str) -> StandardForm:
    """Parse SDPA sparse text into a StandardForm (our sign convention)."""
    tokens: list[str] = []
    for line in text.splitlines():
        stripped = line.strip()
        if not stripped or stripped[0] in '"*':
            continue
        tokens.append(stripped)
    if len(tokens) < 4:
        raise ParseError("SDPA file too short")

    def numbers(line: str) -> list[float]:
        cleaned = line.replace(",", " ").replace("(", " ").replace(")", " ").replace("{", " ").replace("}", " ")
        return [float(t) for t in cleaned.split()]

    try:
        m = int(numbers(tokens[0])[0])
        nblocks = int(numbers(tokens[1])[0])
        sizes = [int(v) for v in numbers(tokens[2])]
        c_sdpa = numbers(tokens[3])
    except (ValueError, IndexError) as exc:
        raise ParseError(f"bad SDPA header: {exc}")
    if len(sizes) != nblocks:
        raise ParseError(f"block count {nblocks} but {len(sizes)} sizes given")
    if len(c_sdpa) != m:
        raise ParseError(f"{m} variables but {len(c_sdpa)} objective entries")

    # expand diagonal blocks into 1x1 blocks; remember offsets
    expanded: list[int] = []
    block_of: list[tuple[int, int]] = []  # sdpa block -> (first expanded idx, size or -size)
    for s in sizes:
        block_of.append((len(expanded), s))
        if s < 0:
            expanded.extend([1] * (-s))
        else:
            expanded.append(s)

    f0 = [np.zeros((d, d)) for d in expanded]
    var_entries: list[list[tuple[int, int, int, float]]] = [[] for _ in expanded]
    for line in tokens[4:]:
        parts = numbers(line)
        if len(parts) != 5:
            raise ParseError(f"bad entry line {line!r}")
        k, b, i, j, v = int(parts[0]), int(parts[1]), int(parts[2]), int(parts[3]), parts[4]
        if not (0 <= k <= m) or not (1 <= b <= nblocks):
            raise ParseError(f"entry indices out of range in {line!r}")
        base, size = block_of[b - 1]
        if size < 0:
            if i != j:
                raise ParseError(f"off-diagonal entry in diagonal block: {line!r}")
            tgt, ii, jj = base + i - 1, 0, 0
        else:
            if not (1 <= i <= j <= size):
                raise ParseError(f"entry must be upper-triangle 1-indexed: {line!r}")
            tgt, ii, jj = base, i - 1, j - 1
        if k == 0:
            f0[tgt][ii, jj] += -v  # F0_ours = -F0_sdpa
            if ii != jj:
                f0[tgt][jj, ii] += -v
        else:
            var_entries[tgt].append((k - 1, ii, jj, v))

    blocks = tuple(
        Block.from_entries(expanded[t], [], var_entries[t])
        for t in range(len(expanded))
    )
    # fold the constants in afterwards (from_entries starts from zero)
    patched = []
    for blk, const in zip(blocks, f0):
        patched.append(Block(blk.dim, const, blk.var, blk.rows, blk.cols, blk.vals))
    return StandardForm(c=-np.asarray(c_sdpa), blocks=tuple(patched))
