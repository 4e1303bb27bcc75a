"""Tokenizer for the .pd language.

Comments are kept as trivia (they become Comment-tagged locations).
Columns count Unicode scalar values, 1-based.
"""

from __future__ import annotations

from dataclasses import dataclass

KEYWORDS = {
    "fn", "let", "if", "else", "while", "return",
    "true", "false",
    "spawn", "task", "process", "actor", "join",
    "channel", "lock", "acquire", "release",
    "monitor", "cond", "wait", "signal",
    "atomic", "cell",
    "whenResolved", "resolve",
}

PUNCTUATION = [
    "<-", "==", "!=", "<=", ">=", "&&", "||",
    "(", ")", "{", "}", "[", "]",
    ",", ";", ".", "=", "<", ">", "+", "-", "*", "/", "%", "!",
]


@dataclass
class Token:
    kind: str  # "ident" | "int" | "string" | "keyword" | punctuation literal | "eof"
    text: str
    line: int
    column: int

    @property
    def length(self) -> int:
        return len(self.text)


@dataclass
class Trivia:
    """Non-token source range the parser still tags (comments)."""

    kind: str
    line: int
    column: int
    length: int


class LexError(Exception):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(message)
        self.message = message
        self.line = line
        self.column = column


def tokenize(text: str) -> tuple[list[Token], list[Trivia]]:
    tokens: list[Token] = []
    trivia: list[Trivia] = []
    i = 0
    line = 1
    col = 1
    n = len(text)

    def bump(count: int):
        nonlocal i, line, col
        for _ in range(count):
            if text[i] == "\n":
                line += 1
                col = 1
            else:
                col += 1
            i += 1

    while i < n:
        ch = text[i]
        if ch in " \t\r\n":
            bump(1)
            continue
        if ch == "/" and text.startswith("//", i):
            start_line, start_col = line, col
            length = 0
            while i < n and text[i] != "\n":
                bump(1)
                length += 1
            trivia.append(Trivia("comment", start_line, start_col, length))
            continue
        if ch.isdigit():
            start_line, start_col = line, col
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(Token("int", text[i:j], start_line, start_col))
            bump(j - i)
            continue
        if ch == '"':
            start_line, start_col = line, col
            j = i + 1
            out = []
            while j < n and text[j] != '"':
                if text[j] == "\\" and j + 1 < n:
                    esc = text[j + 1]
                    out.append({"n": "\n", "t": "\t", '"': '"', "\\": "\\"}.get(esc, esc))
                    j += 2
                else:
                    out.append(text[j])
                    j += 1
            if j >= n:
                raise LexError("unterminated string literal", start_line, start_col)
            token = Token("string", text[i : j + 1], start_line, start_col)
            token.value = "".join(out)  # type: ignore[attr-defined]
            tokens.append(token)
            bump(j + 1 - i)
            continue
        if ch.isalpha() or ch == "_":
            start_line, start_col = line, col
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            kind = "keyword" if word in KEYWORDS else "ident"
            tokens.append(Token(kind, word, start_line, start_col))
            bump(j - i)
            continue
        for punct in PUNCTUATION:
            if text.startswith(punct, i):
                tokens.append(Token(punct, punct, line, col))
                bump(len(punct))
                break
        else:
            raise LexError(f"unexpected character {ch!r}", line, col)

    tokens.append(Token("eof", "", line, col))
    return tokens, trivia
