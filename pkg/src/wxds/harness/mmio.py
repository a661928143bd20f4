"""Matrix Market (``.mtx``) reading and writing for dense real matrices.

Only the real/integer/pattern fields are accepted, in ``array`` or
``coordinate`` layout with ``general``, ``symmetric`` or ``skew-symmetric``
symmetry. Everything is densified on load. Parse errors carry the file name
and line number.
"""

import numpy as np

from wxds.lti import LtiSystem, mass_is_nonsingular


class MatrixMarketError(ValueError):
    def __init__(self, path, line, msg):
        where = f'{path}:{line}' if line else str(path)
        super().__init__(f'{where}: {msg}')
        self.path = str(path)
        self.line = line


class SystemDimensionError(ValueError):
    pass


class SingularMassError(ValueError):
    pass


def _data_lines(lines, start):
    for no, raw in enumerate(lines[start:], start=start + 1):
        s = raw.strip()
        if s and not s.startswith('%'):
            yield no, s


def read_mtx(path):
    """Read a real Matrix Market file into a dense array."""
    try:
        with open(path) as f:
            lines = f.read().splitlines()
    except OSError as e:
        raise MatrixMarketError(path, 0, f'cannot read file ({e.strerror})') from e
    if not lines:
        raise MatrixMarketError(path, 1, 'empty file')
    header = lines[0].split()
    if len(header) != 5 or header[0].lower() != '%%matrixmarket' or header[1].lower() != 'matrix':
        raise MatrixMarketError(path, 1, 'missing "%%MatrixMarket matrix" header')
    layout, fld, sym = (h.lower() for h in header[2:])
    if layout not in ('array', 'coordinate'):
        raise MatrixMarketError(path, 1, f'unsupported layout {layout!r}')
    if fld not in ('real', 'integer', 'double', 'pattern') or (fld == 'pattern' and layout == 'array'):
        raise MatrixMarketError(path, 1, f'unsupported field {fld!r}')
    if sym not in ('general', 'symmetric', 'skew-symmetric'):
        raise MatrixMarketError(path, 1, f'unsupported symmetry {sym!r}')

    body = _data_lines(lines, 1)
    try:
        no, size = next(body)
    except StopIteration:
        raise MatrixMarketError(path, len(lines), 'missing size line') from None
    try:
        dims = [int(t) for t in size.split()]
    except ValueError:
        raise MatrixMarketError(path, no, f'malformed size line {size!r}') from None
    expected = 3 if layout == 'coordinate' else 2
    if len(dims) != expected or min(dims) < 0:
        raise MatrixMarketError(path, no, f'malformed size line {size!r}')
    rows, cols = dims[:2]
    if sym != 'general' and rows != cols:
        raise MatrixMarketError(path, no, f'{sym} matrix must be square')
    out = np.zeros((rows, cols))

    if layout == 'array':
        if sym == 'general':
            idx = [(i, j) for j in range(cols) for i in range(rows)]
        elif sym == 'symmetric':
            idx = [(i, j) for j in range(cols) for i in range(j, rows)]
        else:
            idx = [(i, j) for j in range(cols) for i in range(j + 1, rows)]
        count = 0
        for no, s in body:
            if count >= len(idx):
                raise MatrixMarketError(path, no, 'too many entries')
            try:
                (v,) = (float(t) for t in s.split())
            except ValueError:
                raise MatrixMarketError(path, no, f'malformed entry {s!r}') from None
            out[idx[count]] = v
            count += 1
        if count != len(idx):
            raise MatrixMarketError(path, len(lines), f'expected {len(idx)} entries, found {count}')
        entries = [(i, j, out[i, j]) for i, j in idx]
    else:
        nnz = dims[2]
        entries = []
        for no, s in body:
            if len(entries) >= nnz:
                raise MatrixMarketError(path, no, 'more entries than declared')
            tok = s.split()
            try:
                if fld == 'pattern':
                    if len(tok) != 2:
                        raise ValueError
                    i, j, v = int(tok[0]), int(tok[1]), 1.0
                else:
                    if len(tok) != 3:
                        raise ValueError
                    i, j, v = int(tok[0]), int(tok[1]), float(tok[2])
            except ValueError:
                raise MatrixMarketError(path, no, f'malformed entry {s!r}') from None
            if not (1 <= i <= rows and 1 <= j <= cols):
                raise MatrixMarketError(path, no, f'index ({i}, {j}) outside {rows}x{cols}')
            if sym != 'general' and i < j:
                raise MatrixMarketError(path, no, f'upper-triangular entry in {sym} file')
            out[i - 1, j - 1] = v
            entries.append((i - 1, j - 1, v))
        if len(entries) != nnz:
            raise MatrixMarketError(path, len(lines), f'declared {nnz} entries, found {len(entries)}')
    if sym != 'general':
        sign = 1.0 if sym == 'symmetric' else -1.0
        for i, j, v in entries:
            if i != j:
                out[j, i] = sign * v
    return out


def write_mtx(path, M, layout='array'):
    """Write a dense matrix; floats use the shortest round-trip representation.

    ``layout='coordinate'`` stores only the nonzero entries.
    """
    M = np.atleast_2d(np.asarray(M, dtype=float))
    rows, cols = M.shape
    out = [f'%%MatrixMarket matrix {layout} real general']
    if layout == 'array':
        out.append(f'{rows} {cols}')
        out.extend(repr(float(v)) for v in M.ravel(order='F'))
    elif layout == 'coordinate':
        jj, ii = np.nonzero(M.T)
        out.append(f'{rows} {cols} {len(ii)}')
        out.extend(f'{i + 1} {j + 1} {float(M[i, j])!r}' for i, j in zip(ii, jj))
    else:
        raise ValueError(f'unknown layout {layout!r}')
    with open(path, 'w') as f:
        f.write('\n'.join(out) + '\n')


def load_matrix_market(A, B, C, E=None):
    """Read a system from Matrix Market files; ``E = I`` when no mass file is given."""
    mats = {'A': read_mtx(A), 'B': read_mtx(B), 'C': read_mtx(C)}
    paths = {'A': A, 'B': B, 'C': C, 'E': E}
    if E is not None:
        mats['E'] = read_mtx(E)
    N = mats['A'].shape[0]
    checks = [('A', mats['A'].shape == (N, N), f'must be square, is {mats["A"].shape}'),
              ('B', mats['B'].shape[0] == N, f'must have {N} rows, has {mats["B"].shape[0]}'),
              ('C', mats['C'].shape[1] == N, f'must have {N} columns, has {mats["C"].shape[1]}')]
    if E is not None:
        checks.append(('E', mats['E'].shape == (N, N), f'must be {N}x{N}, is {mats["E"].shape}'))
    for key, ok, msg in checks:
        if not ok:
            raise SystemDimensionError(f'{paths[key]}: {key} {msg}')
    if E is not None and not mass_is_nonsingular(mats['E']):
        raise SingularMassError(f'{E}: mass matrix E is singular')
    return LtiSystem(mats['A'], mats['B'], mats['C'], E=mats.get('E'))


def save_system(sys, prefix, sparse_layout=True):
    """Write ``<prefix>E.mtx`` .. ``<prefix>C.mtx``; returns the four paths."""
    paths = {}
    for key in 'EABC':
        path = f'{prefix}{key}.mtx'
        layout = 'coordinate' if sparse_layout and key in 'EA' else 'array'
        write_mtx(path, getattr(sys, key), layout)
        paths[key] = path
    return paths
