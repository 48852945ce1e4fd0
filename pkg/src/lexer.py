"""Line-record lexer for the tempoc text formats."""

from typing import List
from token_types import Token, TokenType, KEYWORDS, COMMENT_MARKERS


class LexicalError(Exception):
    """Raised when a line cannot be turned into a record."""
    pass


class Lexer:
    """Splits instance, solution, set-system, decomposition, marks and
    DIMACS files into records, one per non-blank, non-comment line."""

    def __init__(self, source: str):
        """Initialize lexer with file contents.

        Args:
            source: The text to tokenize
        """
        self.source = source
        self.line = 0
        self.tokens: List[Token] = []
        self.errors: List[str] = []

    def is_comment(self, text: str) -> bool:
        """A comment is a line whose first word is a comment marker."""
        return text.split(None, 1)[0] in COMMENT_MARKERS or text.startswith('#')

    def read_record(self, text: str) -> Token:
        """Turn one stripped line into a record."""
        parts = text.split()
        keyword = parts[0]

        token_type = KEYWORDS.get(keyword)
        if token_type is not None:
            return Token(token_type, text, parts[1:], self.line)

        # DIMACS clauses are bare literal lists
        if keyword.lstrip('-').isdigit():
            return Token(TokenType.CLAUSE, text, parts, self.line)

        raise LexicalError(f"Line {self.line}: unknown record keyword '{keyword}'")

    def tokenize(self) -> List[Token]:
        """Tokenize the whole source."""
        for raw in self.source.splitlines():
            self.line += 1
            text = raw.strip()

            if not text or self.is_comment(text):
                continue

            try:
                self.tokens.append(self.read_record(text))
            except LexicalError as e:
                self.errors.append(str(e))

        self.tokens.append(Token(TokenType.EOF, '', [], self.line + 1))
        return self.tokens

    def has_errors(self) -> bool:
        """Check if lexer encountered any errors."""
        return len(self.errors) > 0

    def get_errors(self) -> List[str]:
        """Get all lexical errors."""
        return self.errors
