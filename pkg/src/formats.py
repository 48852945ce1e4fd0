"""Parsers and canonical serializers for the tempoc text formats.

Instance:        p tgraph <n> <m> <tau>      then m lines  e <u> <v> <t1,t2,...>
Solution:        s <cover|matching> <count>  then count lines  e <u> <v>
Set system:      p setsys <n> <m>            then m lines  s <e1,e2,...>
Decomposition:   b <node> <kind> <v1,...>    and  t <parent> <child>
Gadget sidecar:  g <kind> <threshold>        then  m <u> <v> <mark>
CNF (DIMACS):    p cnf <n> <m>               then m clauses terminated by 0
"""

from typing import Dict, List, Optional, Tuple

from token_types import Token, TokenType
from lexer import Lexer
from temporal_graph import (Edge, GraphError, SolutionKind, SolutionSet,
                            TemporalGraph, StaticGraph, make_edge)
from static_alg import SetSystem
from treedec import NiceTreeDecomposition, NodeKind, TreeDecomposition

EMPTY = '-'


class ParseError(Exception):
    """Raised when a file does not follow its format."""
    pass


class RecordParser:
    """Cursor over the records of one file, in the style of a
    recursive descent parser: one method per record shape."""

    def __init__(self, source: str):
        """Initialize parser with file contents.

        Args:
            source: Text of the file to parse
        """
        lexer = Lexer(source)
        self.tokens = lexer.tokenize()
        if lexer.has_errors():
            raise ParseError(lexer.get_errors()[0])
        self.pos = 0
        self.errors: List[str] = []

    def current_token(self) -> Token:
        """Get current record."""
        if self.pos >= len(self.tokens):
            return self.tokens[-1]  # EOF
        return self.tokens[self.pos]

    def advance(self) -> Token:
        """Move to next record."""
        token = self.current_token()
        if self.pos < len(self.tokens) - 1:
            self.pos += 1
        return token

    def match(self, *types: TokenType) -> bool:
        """Check if the current record is one of the given types."""
        return self.current_token().type in types

    def error(self, token: Token, message: str) -> ParseError:
        error = f"Line {token.line}: {message}"
        self.errors.append(error)
        return ParseError(error)

    def consume(self, token_type: TokenType, arity: Optional[int] = None,
                message: str = "") -> Token:
        """Consume a record of the expected type (and field count)."""
        token = self.current_token()
        if token.type != token_type:
            found = 'end of file' if token.type == TokenType.EOF else f"'{token.lexeme}'"
            raise self.error(token, message or f"expected {token_type.name} record, found {found}")
        if arity is not None and len(token.fields) != arity:
            raise self.error(token, f"expected {arity} fields in '{token.lexeme}'")
        return self.advance()

    def integer(self, token: Token, text: str, what: str) -> int:
        try:
            return int(text)
        except ValueError:
            raise self.error(token, f"{what} '{text}' is not an integer") from None

    def integer_list(self, token: Token, text: str, what: str) -> List[int]:
        if text == EMPTY:
            return []
        return [self.integer(token, part, what) for part in text.split(',')]

    def expect_end(self):
        if not self.match(TokenType.EOF):
            token = self.current_token()
            raise self.error(token, f"unexpected record '{token.lexeme}'")

    def has_errors(self) -> bool:
        return len(self.errors) > 0

    def get_errors(self) -> List[str]:
        return self.errors


class InstanceParser(RecordParser):
    """Parser for temporal graph instance files."""

    def parse(self) -> TemporalGraph:
        header = self.consume(TokenType.PROBLEM, 4, "expected header 'p tgraph <n> <m> <tau>'")
        if header.fields[0] != 'tgraph':
            raise self.error(header, f"expected problem type 'tgraph', found '{header.fields[0]}'")
        n = self.integer(header, header.fields[1], 'vertex count')
        m = self.integer(header, header.fields[2], 'edge count')
        tau = self.integer(header, header.fields[3], 'lifetime')
        if n < 0 or m < 0:
            raise self.error(header, "vertex and edge counts must be non-negative")
        if tau < 1:
            raise self.error(header, f"lifetime must be positive, got {tau}")

        labels: Dict[Edge, frozenset] = {}
        while self.match(TokenType.EDGE):
            token = self.consume(TokenType.EDGE, 3)
            edge = self.edge(token, n)
            if edge in labels:
                raise self.error(token, f"duplicate edge {edge[0]} {edge[1]}")
            times = self.integer_list(token, token.fields[2], 'time')
            if not times:
                raise self.error(token, f"edge {edge[0]} {edge[1]} has an empty label set")
            if len(set(times)) != len(times):
                raise self.error(token, f"edge {edge[0]} {edge[1]} repeats a time")
            for t in times:
                if not 1 <= t <= tau:
                    raise self.error(token, f"label {t} out of range 1..{tau}")
            labels[edge] = frozenset(times)

        self.expect_end()
        if len(labels) != m:
            raise self.error(header, f"header announces {m} edges, found {len(labels)}")
        return TemporalGraph(StaticGraph(n, frozenset(labels)), tau, labels)

    def edge(self, token: Token, n: int) -> Edge:
        u = self.integer(token, token.fields[0], 'vertex')
        v = self.integer(token, token.fields[1], 'vertex')
        for w in (u, v):
            if not 1 <= w <= n:
                raise self.error(token, f"vertex {w} out of range 1..{n}")
        if u == v:
            raise self.error(token, f"self-loop on vertex {u}")
        return make_edge(u, v)


class SolutionParser(RecordParser):
    """Parser for solution files."""

    def parse(self) -> SolutionSet:
        header = self.consume(TokenType.SET, 2, "expected header 's <kind> <count>'")
        try:
            kind = SolutionKind(header.fields[0])
        except ValueError:
            raise self.error(header, f"unknown solution kind '{header.fields[0]}'") from None
        count = self.integer(header, header.fields[1], 'edge count')

        edges = set()
        while self.match(TokenType.EDGE):
            token = self.consume(TokenType.EDGE, 2)
            u = self.integer(token, token.fields[0], 'vertex')
            v = self.integer(token, token.fields[1], 'vertex')
            if u == v:
                raise self.error(token, f"self-loop on vertex {u}")
            edge = make_edge(u, v)
            if edge in edges:
                raise self.error(token, f"duplicate edge {u} {v}")
            edges.add(edge)

        self.expect_end()
        if len(edges) != count:
            raise self.error(header, f"header announces {count} edges, found {len(edges)}")
        return SolutionSet(kind, frozenset(edges))


class SetSystemParser(RecordParser):
    """Parser for set-system files; the universe is 1..n."""

    def parse(self) -> SetSystem:
        header = self.consume(TokenType.PROBLEM, 3, "expected header 'p setsys <n> <m>'")
        if header.fields[0] != 'setsys':
            raise self.error(header, f"expected problem type 'setsys', found '{header.fields[0]}'")
        n = self.integer(header, header.fields[1], 'universe size')
        m = self.integer(header, header.fields[2], 'set count')

        sets = []
        while self.match(TokenType.SET):
            token = self.advance()
            if len(token.fields) > 1:
                raise self.error(token, "expected 's <e1,e2,...>'")
            elements = self.integer_list(token, token.fields[0], 'element') if token.fields else []
            for x in elements:
                if not 1 <= x <= n:
                    raise self.error(token, f"element {x} out of range 1..{n}")
            sets.append(frozenset(elements))

        self.expect_end()
        if len(sets) != m:
            raise self.error(header, f"header announces {m} sets, found {len(sets)}")
        return SetSystem(frozenset(range(1, n + 1)), tuple(sets))


class DecompositionParser(RecordParser):
    """Parser for decomposition dumps. Plain bags use kind 'bag'; when every
    bag carries a nice kind the result is a NiceTreeDecomposition."""

    def parse(self) -> TreeDecomposition:
        bags: Dict[int, frozenset] = {}
        kinds: Dict[int, NodeKind] = {}
        while self.match(TokenType.BAG):
            token = self.advance()
            if len(token.fields) not in (2, 3):
                raise self.error(token, "expected 'b <node> <kind> <v1,...>'")
            node = self.integer(token, token.fields[0], 'node id')
            if node in bags:
                raise self.error(token, f"duplicate node {node}")
            try:
                kinds[node] = NodeKind(token.fields[1])
            except ValueError:
                raise self.error(token, f"unknown node kind '{token.fields[1]}'") from None
            members = token.fields[2] if len(token.fields) == 3 else EMPTY
            bags[node] = frozenset(self.integer_list(token, members, 'vertex'))
        if not bags:
            raise self.error(self.current_token(), "decomposition has no bags")

        parent: Dict[int, Optional[int]] = {node: None for node in bags}
        children: Dict[int, List[int]] = {node: [] for node in bags}
        while self.match(TokenType.TREE_EDGE):
            token = self.consume(TokenType.TREE_EDGE, 2)
            p = self.integer(token, token.fields[0], 'node id')
            c = self.integer(token, token.fields[1], 'node id')
            for node in (p, c):
                if node not in bags:
                    raise self.error(token, f"unknown node {node}")
            if parent[c] is not None:
                raise self.error(token, f"node {c} has two parents")
            parent[c] = p
            children[p].append(c)

        self.expect_end()
        roots = [node for node, p in parent.items() if p is None]
        if len(roots) != 1:
            raise self.error(self.current_token(), f"expected one root, found {len(roots)}")

        if all(kind != NodeKind.BAG for kind in kinds.values()):
            return NiceTreeDecomposition.from_parts(bags, children, roots[0], kinds)
        return TreeDecomposition(bags, {n: tuple(cs) for n, cs in children.items()}, roots[0])


class MarksParser(RecordParser):
    """Parser for gadget sidecar files."""

    def parse(self) -> Tuple[str, int, Dict[Edge, int]]:
        header = self.consume(TokenType.GADGET, 2, "expected header 'g <kind> <threshold>'")
        threshold = self.integer(header, header.fields[1], 'threshold')
        marks: Dict[Edge, int] = {}
        while self.match(TokenType.MARK):
            token = self.consume(TokenType.MARK, 3)
            u = self.integer(token, token.fields[0], 'vertex')
            v = self.integer(token, token.fields[1], 'vertex')
            marks[make_edge(u, v)] = self.integer(token, token.fields[2], 'mark')
        self.expect_end()
        return header.fields[0], threshold, marks


class CnfParser(RecordParser):
    """Parser for DIMACS CNF; clause literals are signed variable ids."""

    def parse(self) -> Tuple[int, List[Tuple[int, ...]]]:
        header = self.consume(TokenType.PROBLEM, 3, "expected header 'p cnf <n> <m>'")
        if header.fields[0] != 'cnf':
            raise self.error(header, f"expected problem type 'cnf', found '{header.fields[0]}'")
        n = self.integer(header, header.fields[1], 'variable count')
        m = self.integer(header, header.fields[2], 'clause count')

        clauses: List[Tuple[int, ...]] = []
        pending: List[int] = []
        while self.match(TokenType.CLAUSE):
            token = self.advance()
            for text in token.fields:
                literal = self.integer(token, text, 'literal')
                if literal == 0:
                    clauses.append(tuple(pending))
                    pending = []
                elif abs(literal) > n:
                    raise self.error(token, f"variable {abs(literal)} out of range 1..{n}")
                else:
                    pending.append(literal)
        if pending:
            raise self.error(self.current_token(), "last clause is not terminated by 0")

        self.expect_end()
        if len(clauses) != m:
            raise self.error(header, f"header announces {m} clauses, found {len(clauses)}")
        return n, clauses


def parse_temporal_graph(text: str) -> TemporalGraph:
    """Parse an instance file."""
    try:
        return InstanceParser(text).parse()
    except GraphError as e:
        raise ParseError(str(e)) from e


def parse_solution(text: str) -> SolutionSet:
    return SolutionParser(text).parse()


def parse_set_system(text: str) -> SetSystem:
    return SetSystemParser(text).parse()


def parse_decomposition(text: str) -> TreeDecomposition:
    return DecompositionParser(text).parse()


def parse_marks(text: str) -> Tuple[str, int, Dict[Edge, int]]:
    return MarksParser(text).parse()


def parse_cnf(text: str) -> Tuple[int, List[Tuple[int, ...]]]:
    return CnfParser(text).parse()


def _join(values) -> str:
    values = list(values)
    return ','.join(str(x) for x in values) if values else EMPTY


def serialize_temporal_graph(G: TemporalGraph) -> str:
    """Canonical instance text: sorted edges, ascending times."""
    lines = [f"p tgraph {G.n} {len(G.edges)} {G.tau}"]
    for u, v in G.edges:
        lines.append(f"e {u} {v} {_join(sorted(G.labels[(u, v)]))}")
    return '\n'.join(lines) + '\n'


def serialize_solution(S: SolutionSet) -> str:
    lines = [f"s {S.kind.value} {S.size}"]
    lines += [f"e {u} {v}" for u, v in S.sorted_edges()]
    return '\n'.join(lines) + '\n'


def serialize_set_system(system: SetSystem) -> str:
    """Set systems are written over the universe 1..max(universe)."""
    n = max(system.universe, default=0)
    lines = [f"p setsys {n} {len(system.sets)}"]
    for s in system.sets:
        lines.append(f"s {_join(sorted(s))}" if s else "s")
    return '\n'.join(lines) + '\n'


def serialize_decomposition(D: TreeDecomposition) -> str:
    lines = []
    for node in sorted(D.bags):
        kind = D.kind(node).value
        lines.append(f"b {node} {kind} {_join(sorted(D.bags[node]))}")
    for node in sorted(D.bags):
        for child in D.children[node]:
            lines.append(f"t {node} {child}")
    return '\n'.join(lines) + '\n'


def serialize_marks(kind: str, threshold: int, marks: Dict[Edge, int]) -> str:
    lines = [f"g {kind} {threshold}"]
    lines += [f"m {u} {v} {mark}" for (u, v), mark in sorted(marks.items()) if mark != 0]
    return '\n'.join(lines) + '\n'


def serialize_cnf(n: int, clauses) -> str:
    lines = [f"p cnf {n} {len(clauses)}"]
    lines += [' '.join(str(x) for x in clause) + ' 0' for clause in clauses]
    return '\n'.join(lines) + '\n'
