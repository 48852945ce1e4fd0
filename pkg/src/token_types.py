"""Record types and record class for the tempoc text formats."""

from enum import Enum, auto
from dataclasses import dataclass, field
from typing import List


class TokenType(Enum):
    """Kinds of line records found in tempoc files."""

    # Headers
    PROBLEM = auto()      # p tgraph / p setsys / p cnf
    GADGET = auto()       # g <kind> <threshold>

    # Bodies
    EDGE = auto()         # e <u> <v> [<times>]
    SET = auto()          # s <elements>  (also the solution header)
    MARK = auto()         # m <u> <v> <mark>
    BAG = auto()          # b <node> <kind> <vertices>
    TREE_EDGE = auto()    # t <parent> <child>
    CLAUSE = auto()       # DIMACS clause line

    # Special
    EOF = auto()


@dataclass
class Token:
    """One non-comment line of an input file."""

    type: TokenType
    lexeme: str
    fields: List[str] = field(default_factory=list)
    line: int = 1

    def __repr__(self) -> str:
        return f"Token({self.type.name}, '{self.lexeme}', {self.line})"


KEYWORDS = {
    'p': TokenType.PROBLEM,
    'g': TokenType.GADGET,
    'e': TokenType.EDGE,
    's': TokenType.SET,
    'm': TokenType.MARK,
    'b': TokenType.BAG,
    't': TokenType.TREE_EDGE,
}

# Lines starting with these are skipped ('c' is the DIMACS comment marker).
COMMENT_MARKERS = ('#', 'c')
