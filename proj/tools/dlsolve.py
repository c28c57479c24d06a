#!/usr/bin/env python3
"""Exact SMT-LIB v2 solver for quantifier-free integer difference logic.

Accepts the fragment used by the workbench's export: boolean combinations
(and/or/not) of atoms `(<= t c)`, `(< t c)`, `(>= t c)`, `(> t c)`, `(= t c)`
where every linear term reduces to `x - y`, `x`, `-x`, or a constant with
unit coefficients.  Satisfiability of each disjunct is decided exactly with
Bellman-Ford negative-cycle detection over the difference-constraint graph,
so answers are `sat`/`unsat` (never approximate); inputs outside the
fragment yield `unknown`.

Speaks enough of the standard protocol for incremental use:
`set-logic`, `set-option`, `set-info`, `declare-const`, `declare-fun`,
`assert`, `check-sat`, `get-value`, `echo`, `reset`, `exit`.
"""

import sys


class Unsupported(Exception):
    pass


# --------------------------------------------------------------------------
# Tokenizer / reader
# --------------------------------------------------------------------------

def tokenize(text):
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
        elif c == ';':
            while i < n and text[i] != '\n':
                i += 1
        elif c in '()':
            yield c
            i += 1
        elif c == '"':
            j = i + 1
            buf = []
            while j < n:
                if text[j] == '"':
                    if j + 1 < n and text[j + 1] == '"':  # escaped quote
                        buf.append('"')
                        j += 2
                        continue
                    break
                buf.append(text[j])
                j += 1
            yield ('str', ''.join(buf))
            i = j + 1
        elif c == '|':
            j = text.index('|', i + 1)
            yield text[i + 1:j]
            i = j + 1
        else:
            j = i
            while j < n and not text[j].isspace() and text[j] not in '();"|':
                j += 1
            yield text[i:j]
            i = j


def read_forms(tokens):
    """Builds nested lists from a token iterator; yields one form at a time."""
    stack = []
    for tok in tokens:
        if tok == '(':
            stack.append([])
        elif tok == ')':
            if not stack:
                raise Unsupported('unbalanced parentheses')
            done = stack.pop()
            if stack:
                stack[-1].append(done)
            else:
                yield done
        else:
            if stack:
                stack[-1].append(tok)
            else:
                yield tok
    if stack:
        raise Unsupported('unbalanced parentheses')


# --------------------------------------------------------------------------
# Terms -> linear forms with unit coefficients
# --------------------------------------------------------------------------

def as_int(tok):
    if isinstance(tok, str):
        try:
            return int(tok)
        except ValueError:
            return None
    return None


def linear(term):
    """Returns (coeffs: dict var->int, const: int)."""
    if isinstance(term, str):
        v = as_int(term)
        if v is not None:
            return {}, v
        return {term: 1}, 0
    if not term:
        raise Unsupported('empty term')
    op = term[0]
    if op == '-':
        if len(term) == 2:
            c, k = linear(term[1])
            return {v: -a for v, a in c.items()}, -k
        coeffs, const = linear(term[1])
        coeffs = dict(coeffs)
        for sub in term[2:]:
            c2, k2 = linear(sub)
            for v, a in c2.items():
                coeffs[v] = coeffs.get(v, 0) - a
            const -= k2
        return coeffs, const
    if op == '+':
        coeffs, const = {}, 0
        for sub in term[1:]:
            c2, k2 = linear(sub)
            for v, a in c2.items():
                coeffs[v] = coeffs.get(v, 0) + a
            const += k2
        return coeffs, const
    if op == '*':
        if len(term) == 3:
            ca, ka = linear(term[1])
            cb, kb = linear(term[2])
            if not ca:
                return {v: ka * a for v, a in cb.items()}, ka * kb
            if not cb:
                return {v: kb * a for v, a in ca.items()}, ka * kb
        raise Unsupported('nonlinear term')
    raise Unsupported('term operator ' + str(op))


def difference_edge(coeffs, bound):
    """Encodes sum(coeffs) <= bound as one graph edge (u, v, w): v - u <= w.

    The zero pseudo-variable is the node '#0'.  Returns None for a
    variable-free atom that simply holds, and raises Unsat via ValueError
    when a variable-free atom is violated.
    """
    items = [(v, a) for v, a in coeffs.items() if a != 0]
    if not items:
        if 0 <= bound:
            return None
        raise ValueError('false')
    if len(items) == 1:
        v, a = items[0]
        if a == 1:
            return ('#0', v, bound)      # v <= bound
        if a == -1:
            return (v, '#0', bound)      # -v <= bound
        raise Unsupported('non-unit coefficient')
    if len(items) == 2:
        (v1, a1), (v2, a2) = items
        if a1 == 1 and a2 == -1:
            return (v2, v1, bound)       # v1 - v2 <= bound
        if a1 == -1 and a2 == 1:
            return (v1, v2, bound)       # v2 - v1 <= bound
        raise Unsupported('non-unit coefficients')
    raise Unsupported('more than two variables in one atom')


# --------------------------------------------------------------------------
# Formulas -> NNF trees of atoms
# --------------------------------------------------------------------------

TRUE = ('true',)
FALSE = ('false',)


def nnf(form, neg):
    """Normalizes to ('and'|'or', kids) / ('atom', edges) / TRUE / FALSE.

    An atom's payload is the list of edges its conjunction contributes
    (equality contributes two).
    """
    if isinstance(form, str):
        if form == 'true':
            return FALSE if neg else TRUE
        if form == 'false':
            return TRUE if neg else FALSE
        raise Unsupported('boolean symbol ' + form)
    op = form[0]
    if op == 'not':
        return nnf(form[1], not neg)
    if op in ('and', 'or'):
        kids = [nnf(k, neg) for k in form[1:]]
        node = 'or' if (op == 'and') == neg else 'and'
        flat = []
        for k in kids:
            if k == (TRUE if node == 'and' else FALSE):
                continue
            if k == (FALSE if node == 'and' else TRUE):
                return FALSE if node == 'and' else TRUE
            flat.append(k)
        if not flat:
            return TRUE if node == 'and' else FALSE
        if len(flat) == 1:
            return flat[0]
        return (node, flat)
    if op in ('<=', '<', '>=', '>', '='):
        lc, lk = linear(form[1])
        rc, rk = linear(form[2])
        poly = dict(lc)
        for v, a in rc.items():
            poly[v] = poly.get(v, 0) - a
        diff = rk - lk  # poly <= diff  encodes  lhs <= rhs
        ineqs = []      # list of (coeffs, bound)
        if op == '<=':
            ineqs = [(poly, diff)]
        elif op == '<':
            ineqs = [(poly, diff - 1)]
        elif op == '>=':
            ineqs = [({v: -a for v, a in poly.items()}, -diff)]
        elif op == '>':
            ineqs = [({v: -a for v, a in poly.items()}, -diff - 1)]
        elif op == '=':
            ineqs = [(poly, diff),
                     ({v: -a for v, a in poly.items()}, -diff)]
        if neg:
            if op == '=':
                # not (a = b)  ->  a < b or a > b
                lt = nnf(['<', form[1], form[2]], False)
                gt = nnf(['>', form[1], form[2]], False)
                return ('or', [lt, gt])
            coeffs, bound = ineqs[0]
            ineqs = [({v: -a for v, a in coeffs.items()}, -bound - 1)]
        edges = []
        for coeffs, bound in ineqs:
            try:
                e = difference_edge(coeffs, bound)
            except ValueError:
                return FALSE
            if e is not None:
                edges.append(e)
        if not edges:
            return TRUE
        return ('atom', edges)
    raise Unsupported('formula operator ' + str(op))


# --------------------------------------------------------------------------
# Difference-constraint satisfiability (Bellman-Ford)
# --------------------------------------------------------------------------

def consistent(edges):
    nodes = {'#0'}
    for u, v, _ in edges:
        nodes.add(u)
        nodes.add(v)
    dist = {x: 0 for x in nodes}
    for _ in range(len(nodes)):
        changed = False
        for u, v, w in edges:
            if dist[u] + w < dist[v]:
                dist[v] = dist[u] + w
                changed = True
        if not changed:
            return dist
    for u, v, w in edges:
        if dist[u] + w < dist[v]:
            return None  # negative cycle
    return dist


def search(pending, edges):
    """Backtracking over or-nodes; returns a satisfying edge list or None."""
    if not pending:
        return edges
    node, rest = pending[0], pending[1:]
    if node == TRUE:
        return search(rest, edges)
    if node == FALSE:
        return None
    kind = node[0]
    if kind == 'and':
        return search(list(node[1]) + rest, edges)
    if kind == 'or':
        for kid in node[1]:
            r = search([kid] + rest, edges)
            if r is not None:
                return r
        return None
    if kind == 'atom':
        grown = edges + node[1]
        if consistent(grown) is None:
            return None
        return search(rest, grown)
    raise Unsupported('node kind ' + str(kind))


# --------------------------------------------------------------------------
# Protocol driver
# --------------------------------------------------------------------------

class Session:
    def __init__(self):
        self.reset()

    def reset(self):
        self.variables = []
        self.assertions = []
        self.model = None

    def check_sat(self):
        self.model = None
        try:
            tree = nnf(['and'] + self.assertions, False) \
                if self.assertions else TRUE
            found = search([tree], [])
        except Unsupported:
            return 'unknown'
        if found is None:
            return 'unsat'
        dist = consistent(found)
        if dist is None:  # cannot happen: search checks every extension
            return 'unknown'
        zero = dist.get('#0', 0)
        self.model = {v: dist.get(v, zero) - zero for v in self.variables}
        return 'sat'

    def get_value(self, names):
        if self.model is None:
            return None
        parts = []
        for name in names:
            v = self.model.get(name, 0)
            lit = '(- {})'.format(-v) if v < 0 else str(v)
            parts.append('({} {})'.format(name, lit))
        return '(' + ' '.join(parts) + ')'


def emit(line):
    sys.stdout.write(line + '\n')
    sys.stdout.flush()


def complete_forms(buf):
    """Splits off every complete top-level form; returns (forms, remainder).

    Needed for incremental operation: the client keeps the pipe open and
    expects replies as soon as each command is complete, so we must not
    wait for end-of-stream.
    """
    forms = []
    depth = 0
    in_str = False
    start = None
    last_end = 0
    i, n = 0, len(buf)
    while i < n:
        c = buf[i]
        if in_str:
            if c == '"':
                if i + 1 < n and buf[i + 1] == '"':
                    i += 2
                    continue
                in_str = False
        elif c == '"':
            in_str = True
        elif c == ';':
            j = buf.find('\n', i)
            if j == -1:
                break
            i = j
        elif c == '(':
            if depth == 0:
                start = i
            depth += 1
        elif c == ')':
            depth -= 1
            if depth == 0 and start is not None:
                forms.append(buf[start:i + 1])
                start = None
                last_end = i + 1
        i += 1
    if depth > 0 and start is not None:
        return forms, buf[start:]
    return forms, buf[last_end:]


def main():
    session = Session()
    buf = ''
    while True:
        chunk = sys.stdin.readline()
        if chunk == '':
            break
        buf += chunk
        ready, buf = complete_forms(buf)
        for text in ready:
            try:
                for form in read_forms(tokenize(text)):
                    run(session, form)
            except Unsupported as ex:
                emit('(error "{}")'.format(ex))


def run(session, form):
    if not isinstance(form, list) or not form:
        emit('(error "expected a command")')
        return
    op = form[0]
    if op in ('set-logic', 'set-option', 'set-info'):
        return
    if op in ('declare-const', 'declare-fun'):
        session.variables.append(form[1])
        return
    if op == 'assert':
        session.assertions.append(form[1])
        return
    if op == 'check-sat':
        emit(session.check_sat())
        return
    if op == 'get-value':
        names = form[1] if len(form) > 1 else []
        reply = session.get_value(names)
        emit(reply if reply is not None
             else '(error "no model is available")')
        return
    if op == 'echo':
        arg = form[1]
        emit(arg[1] if isinstance(arg, tuple) else str(arg))
        return
    if op == 'reset':
        session.reset()
        return
    if op == 'exit':
        sys.exit(0)
    emit('(error "unsupported command: {}")'.format(op))


if __name__ == '__main__':
    main()
