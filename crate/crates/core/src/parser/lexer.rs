use crate::model::{Diagnostic, DiagnosticKind, SourceSpan};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    /// Lowercase-initial identifier; may contain inner `-` (`express-mail`).
    Ident(String),
    /// Uppercase-initial identifier.
    Var(String),
    Int(String),
    Decimal(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    At,
    Colon,
    ColonDash,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
    Hash,
    Dot,
    DotDot,
    Tilde,
    Question,
    Star,
    Plus,
    Minus,
    Slash,
    Dollar,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) | Tok::Var(s) | Tok::Int(s) | Tok::Decimal(s) => format!("`{s}`"),
            Tok::Eof => "end of input".to_string(),
            other => format!("`{}`", other.symbol()),
        }
    }

    fn symbol(&self) -> &'static str {
        match self {
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::Comma => ",",
            Tok::At => "@",
            Tok::Colon => ":",
            Tok::ColonDash => ":-",
            Tok::Lt => "<",
            Tok::Le => "<=",
            Tok::Gt => ">",
            Tok::Ge => ">=",
            Tok::Eq => "=",
            Tok::Ne => "!=",
            Tok::Hash => "#",
            Tok::Dot => ".",
            Tok::DotDot => "..",
            Tok::Tilde => "~",
            Tok::Question => "?",
            Tok::Star => "*",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Slash => "/",
            Tok::Dollar => "$",
            _ => "",
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub span: SourceSpan,
}

pub(crate) fn lex(src: &str) -> (Vec<Token>, Vec<Diagnostic>) {
    let mut lx = Lexer { src, chars: src.char_indices().peekable(), line: 1, col: 1, out: Vec::new(), diags: Vec::new() };
    lx.run();
    (lx.out, lx.diags)
}

struct Lexer<'a> {
    src: &'a str,
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    line: u32,
    col: u32,
    out: Vec<Token>,
    diags: Vec<Diagnostic>,
}

impl Lexer<'_> {
    fn bump(&mut self) -> Option<(usize, char)> {
        let next = self.chars.next();
        if let Some((_, c)) = next {
            if c == '\n' {
                self.line += 1;
                self.col = 1;
            } else {
                self.col += 1;
            }
        }
        next
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().map(|&(_, c)| c)
    }

    fn peek2(&self) -> Option<char> {
        let mut it = self.chars.clone();
        it.next();
        it.next().map(|(_, c)| c)
    }

    fn offset(&mut self) -> usize {
        self.chars.peek().map(|&(i, _)| i).unwrap_or(self.src.len())
    }

    fn run(&mut self) {
        loop {
            let (line, column) = (self.line, self.col);
            let start = self.offset();
            let Some((_, c)) = self.bump() else {
                self.out.push(Token { tok: Tok::Eof, span: SourceSpan { start, end: start, line, column } });
                return;
            };
            let tok = match c {
                c if c.is_whitespace() => continue,
                '%' => {
                    while let Some(c) = self.peek() {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                    continue;
                }
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '[' => Tok::LBracket,
                ']' => Tok::RBracket,
                ',' => Tok::Comma,
                '@' => Tok::At,
                '#' => Tok::Hash,
                '~' => Tok::Tilde,
                '?' => Tok::Question,
                '*' => Tok::Star,
                '+' => Tok::Plus,
                '-' => Tok::Minus,
                '/' => Tok::Slash,
                '$' => Tok::Dollar,
                '=' => Tok::Eq,
                ':' => self.follow('-', Tok::ColonDash, Tok::Colon),
                '<' => self.follow('=', Tok::Le, Tok::Lt),
                '>' => self.follow('=', Tok::Ge, Tok::Gt),
                '.' if self.peek().is_some_and(|c| c.is_ascii_digit())
                    && matches!(self.out.last().map(|t| &t.tok), Some(Tok::LBracket | Tok::Comma)) =>
                {
                    self.number(start)
                }
                '.' => self.follow('.', Tok::DotDot, Tok::Dot),
                '!' if self.peek() == Some('=') => {
                    self.bump();
                    Tok::Ne
                }
                c if c.is_ascii_digit() => self.number(start),
                c if c.is_alphabetic() => self.word(start, c),
                other => {
                    let span = SourceSpan { start, end: start + other.len_utf8(), line, column };
                    self.diags.push(Diagnostic::error(DiagnosticKind::Syntax, span, format!("unexpected character `{other}`")));
                    continue;
                }
            };
            let end = self.offset();
            self.out.push(Token { tok, span: SourceSpan { start, end, line, column } });
        }
    }

    fn follow(&mut self, next: char, yes: Tok, no: Tok) -> Tok {
        if self.peek() == Some(next) {
            self.bump();
            yes
        } else {
            no
        }
    }

    fn number(&mut self, start: usize) -> Tok {
        if self.src[start..].starts_with('.') {
            while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                self.bump();
            }
            let end = self.offset();
            return Tok::Decimal(self.src[start..end].to_string());
        }
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.bump();
        }
        if self.peek() == Some('.') && self.peek2().is_some_and(|c| c.is_ascii_digit()) {
            self.bump();
            while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                self.bump();
            }
            let end = self.offset();
            return Tok::Decimal(self.src[start..end].to_string());
        }
        let end = self.offset();
        Tok::Int(self.src[start..end].to_string())
    }

    fn word(&mut self, start: usize, first: char) -> Tok {
        let lower = first.is_lowercase();
        loop {
            match self.peek() {
                Some(c) if c.is_alphanumeric() || c == '_' => {
                    self.bump();
                }
                Some('-') if lower && self.peek2().is_some_and(|c| c.is_alphanumeric()) => {
                    self.bump();
                }
                _ => break,
            }
        }
        let end = self.offset();
        let text = self.src[start..end].to_string();
        if lower {
            Tok::Ident(text)
        } else {
            Tok::Var(text)
        }
    }
}
