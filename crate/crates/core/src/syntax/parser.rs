//! Hand-written LL(2) parser for the Data (`.msad`), Service (`.msas`) and
//! Operation (`.msao`) languages.
//!
//! Errors are recorded as diagnostics. After an error the parser skips to the
//! end of the enclosing top-level declaration (its matching `}`) or to the
//! next keyword that can only start a declaration, and carries on.

use crate::diagnostic::{sort_diagnostics, Code, Diagnostic};
use crate::model::{
    CommPattern, CommType, MicroserviceType, PrimitiveType, QualifiedName, RegistrationKind,
    TechnologyKind,
};
use crate::span::SourceSpan;

use super::ast::*;
use super::lexer::{lex, unescape, Token, TokenKind};

/// Keywords that only ever start a top-level declaration (or header item).
const DECLARATION_ONLY: &[&str] = &[
    "namespace",
    "import",
    "structure",
    "functional",
    "infrastructure",
    "technology",
    "artifact",
    "service-discovery",
    "api-gateway",
];

/// Lexes and parses `source` as a file of the given viewpoint.
pub fn parse_source(source: &str, file: &str, viewpoint: Viewpoint) -> ParseUnit {
    let (tokens, lex_errors) = lex(source, file);
    let mut unit = parse_tokens(&tokens, viewpoint);
    unit.diagnostics.extend(
        lex_errors
            .into_iter()
            .map(|e| Diagnostic::new(Code::LexError, e.message, e.span)),
    );
    sort_diagnostics(&mut unit.diagnostics);
    unit
}

/// Parses `source`, choosing the language from the file extension.
pub fn parse_file(source: &str, file: &str) -> Result<ParseUnit, Diagnostic> {
    match Viewpoint::from_path(file) {
        Some(v) => Ok(parse_source(source, file, v)),
        None => Err(Diagnostic::new(
            Code::UnknownExtension,
            format!("`{file}` is not a .msad, .msas or .msao file"),
            SourceSpan::file_start(file),
        )),
    }
}

pub fn parse_data(tokens: &[Token]) -> ParseUnit {
    parse_tokens(tokens, Viewpoint::Data)
}

pub fn parse_service(tokens: &[Token]) -> ParseUnit {
    parse_tokens(tokens, Viewpoint::Service)
}

pub fn parse_operation(tokens: &[Token]) -> ParseUnit {
    parse_tokens(tokens, Viewpoint::Operation)
}

pub fn parse_tokens(tokens: &[Token], viewpoint: Viewpoint) -> ParseUnit {
    let file = tokens
        .last()
        .map(|t| t.span.file.clone())
        .unwrap_or_default();
    let mut toks: Vec<Token> = tokens
        .iter()
        .filter(|t| !matches!(t.kind, TokenKind::Comment | TokenKind::Eof))
        .cloned()
        .collect();
    let eof_span = tokens
        .last()
        .map(|t| SourceSpan::new(&file, t.span.end(), t.span.end()))
        .unwrap_or_else(|| SourceSpan::file_start(&file));
    toks.push(Token {
        kind: TokenKind::Eof,
        text: String::new(),
        span: eof_span.clone(),
        offset: tokens.last().map_or(0, |t| t.offset + t.text.len()),
    });
    let mut p = Parser {
        toks,
        pos: 0,
        depth: 0,
        last: SourceSpan::file_start(&file),
        item_start: 0,
        diags: Vec::new(),
    };
    let mut unit = ParseUnit {
        file,
        viewpoint,
        namespace: None,
        imports: Vec::new(),
        declarations: Vec::new(),
        diagnostics: Vec::new(),
    };
    p.header(&mut unit);
    while !p.at_eof() {
        p.item_start = p.pos;
        match p.declaration(viewpoint) {
            Ok(decl) => unit.declarations.push(decl),
            Err(Failed) => p.recover(),
        }
    }
    sort_diagnostics(&mut p.diags);
    unit.diagnostics = p.diags;
    unit
}

/// Marker for a failure whose diagnostic has already been recorded.
#[derive(Debug)]
struct Failed;

type PResult<T> = Result<T, Failed>;

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    /// Braces opened and not yet closed.
    depth: usize,
    /// Span of the most recently consumed token.
    last: SourceSpan,
    /// Token index where the current top-level item began.
    item_start: usize,
    diags: Vec<Diagnostic>,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn peek_at(&self, n: usize) -> &Token {
        &self.toks[(self.pos + n).min(self.toks.len() - 1)]
    }

    fn at_eof(&self) -> bool {
        self.peek().kind == TokenKind::Eof
    }

    fn at_kw(&self, kw: &str) -> bool {
        self.peek().is_keyword(kw)
    }

    fn at_punct(&self, p: &str) -> bool {
        self.peek().is_punct(p)
    }

    fn bump(&mut self) -> Token {
        let tok = self.toks[self.pos].clone();
        if tok.kind != TokenKind::Eof {
            self.pos += 1;
            if tok.is_punct("{") {
                self.depth += 1;
            } else if tok.is_punct("}") {
                self.depth = self.depth.saturating_sub(1);
            }
            self.last = tok.span.clone();
        }
        tok
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        if self.at_kw(kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        if self.at_punct(p) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn error(&mut self, code: Code, message: String, span: SourceSpan) {
        self.diags.push(Diagnostic::new(code, message, span));
    }

    fn unexpected<T>(&mut self, expected: &str) -> PResult<T> {
        let tok = self.peek().clone();
        self.error(
            Code::UnexpectedToken,
            format!("unexpected {tok}, expected {expected}"),
            tok.span,
        );
        Err(Failed)
    }

    fn expect_kw(&mut self, kw: &str) -> PResult<Token> {
        if self.at_kw(kw) {
            Ok(self.bump())
        } else {
            self.unexpected(&format!("`{kw}`"))
        }
    }

    fn expect_punct(&mut self, p: &str) -> PResult<Token> {
        if self.at_punct(p) {
            Ok(self.bump())
        } else {
            self.unexpected(&format!("`{p}`"))
        }
    }

    fn span_from(&self, start: &SourceSpan) -> SourceSpan {
        start.to(&self.last)
    }

    fn ident(&mut self) -> PResult<Name> {
        if self.peek().kind == TokenKind::Ident {
            let tok = self.bump();
            Ok(Name {
                text: tok.text,
                span: tok.span.into(),
            })
        } else {
            self.unexpected("an identifier")
        }
    }

    fn qname(&mut self) -> PResult<NameRef> {
        let first = self.ident()?;
        let start = first.span.get().clone();
        let mut segments = vec![first.text];
        while self.at_punct(".") && self.peek_at(1).kind == TokenKind::Ident {
            self.bump();
            segments.push(self.bump().text);
        }
        let name = QualifiedName::new(segments).expect("identifier tokens form valid segments");
        Ok(NameRef {
            name,
            span: self.span_from(&start).into(),
        })
    }

    fn qname_list(&mut self) -> PResult<Vec<NameRef>> {
        let mut names = vec![self.qname()?];
        while self.eat_punct(",") {
            names.push(self.qname()?);
        }
        Ok(names)
    }

    fn string(&mut self) -> PResult<String> {
        if self.peek().kind == TokenKind::StringLit {
            Ok(unescape(&self.bump().text))
        } else {
            self.unexpected("a string literal")
        }
    }

    fn int(&mut self) -> PResult<u32> {
        if self.peek().kind != TokenKind::IntLit {
            return self.unexpected("an integer");
        }
        let tok = self.bump();
        match tok.text.parse() {
            Ok(n) => Ok(n),
            Err(_) => {
                self.error(
                    Code::InvalidLiteral,
                    format!("integer `{}` is out of range", tok.text),
                    tok.span,
                );
                Err(Failed)
            }
        }
    }

    fn type_expr(&mut self, allow_list: bool) -> PResult<TypeExpr> {
        if allow_list && self.eat_kw("list") {
            return Ok(TypeExpr::Named {
                list: true,
                name: self.qname()?,
            });
        }
        let tok = self.peek();
        if tok.kind == TokenKind::Ident && !self.peek_at(1).is_punct(".") {
            if let Some(prim) = PrimitiveType::from_keyword(&tok.text) {
                let tok = self.bump();
                return Ok(TypeExpr::Primitive(prim, tok.span.into()));
            }
        }
        if tok.kind != TokenKind::Ident {
            return self.unexpected("a type");
        }
        Ok(TypeExpr::Named {
            list: false,
            name: self.qname()?,
        })
    }

    /// Reports a clause that appeared twice; the first occurrence wins.
    fn duplicate_clause(&mut self, clause: &str, span: SourceSpan) {
        self.error(
            Code::DuplicateClause,
            format!("`{clause}` given more than once"),
            span,
        );
    }

    fn missing_clause(&mut self, clause: &str, owner: &str, span: SourceSpan) {
        self.error(
            Code::MissingClause,
            format!("{owner} requires a `{clause}` clause"),
            span,
        );
    }

    /// Skips past the malformed region: to the matching `}` of the current
    /// top-level declaration, or to the next declaration-only keyword.
    fn recover(&mut self) {
        loop {
            let tok = self.peek();
            if tok.kind == TokenKind::Eof {
                break;
            }
            let starts_decl = tok.kind == TokenKind::Keyword
                && (DECLARATION_ONLY.contains(&tok.text.as_str())
                    || (self.depth == 0 && matches!(tok.text.as_str(), "list" | "container")));
            // Stop in front of the next declaration, but always make progress.
            if starts_decl && self.pos > self.item_start {
                break;
            }
            let closes = tok.is_punct("}");
            self.bump();
            if closes && self.depth == 0 {
                break;
            }
        }
        self.depth = 0;
    }

    fn header(&mut self, unit: &mut ParseUnit) {
        if self.at_kw("namespace") {
            self.bump();
            match self.qname() {
                Ok(ns) => unit.namespace = Some(ns),
                Err(Failed) => self.recover(),
            }
        } else {
            let tok = self.peek().clone();
            let message = if tok.kind == TokenKind::Eof {
                "empty model file: expected a `namespace` header".to_string()
            } else {
                format!("expected a `namespace` header, found {tok}")
            };
            self.error(Code::MissingNamespace, message, tok.span);
        }
        while self.at_kw("import") {
            self.item_start = self.pos;
            match self.import() {
                Ok(import) => {
                    if unit
                        .imports
                        .iter()
                        .any(|i| i.alias.text == import.alias.text)
                    {
                        self.error(
                            Code::DuplicateAlias,
                            format!("import alias `{}` is already in use", import.alias.text),
                            import.alias.span.get().clone(),
                        );
                    } else {
                        unit.imports.push(import);
                    }
                }
                Err(Failed) => self.recover(),
            }
        }
    }

    fn import(&mut self) -> PResult<Import> {
        let start = self.expect_kw("import")?.span;
        let path = self.string()?;
        self.expect_kw("as")?;
        let alias = self.ident()?;
        Ok(Import {
            path,
            alias,
            span: self.span_from(&start).into(),
        })
    }

    fn declaration(&mut self, viewpoint: Viewpoint) -> PResult<Decl> {
        let tok = self.peek();
        let kw = if tok.kind == TokenKind::Keyword {
            tok.text.as_str()
        } else {
            ""
        };
        match (viewpoint, kw) {
            (Viewpoint::Data, "structure") => self.structure().map(Decl::Structure),
            (Viewpoint::Data, "list") => self.list_type().map(Decl::List),
            (Viewpoint::Service, "functional" | "infrastructure") => {
                self.microservice().map(Decl::Microservice)
            }
            (Viewpoint::Operation, "technology") => self.technology().map(Decl::Technology),
            (Viewpoint::Operation, "artifact") => self.artifact().map(Decl::Artifact),
            (Viewpoint::Operation, "container") => self.container().map(Decl::Container),
            (Viewpoint::Operation, "service-discovery" | "api-gateway") => {
                self.registration().map(Decl::Registration)
            }
            (Viewpoint::Data, _) => self.unexpected("`structure` or `list`"),
            (Viewpoint::Service, _) => self.unexpected("`functional` or `infrastructure`"),
            (Viewpoint::Operation, _) => self.unexpected(
                "`technology`, `artifact`, `container`, `service-discovery` or `api-gateway`",
            ),
        }
    }

    // Data viewpoint

    fn structure(&mut self) -> PResult<StructureDecl> {
        let start = self.expect_kw("structure")?.span;
        let name = self.ident()?;
        self.expect_punct("{")?;
        let mut fields = Vec::new();
        while !self.at_punct("}") {
            let fname = self.ident()?;
            let fstart = fname.span.get().clone();
            self.expect_punct(":")?;
            let ty = self.type_expr(true)?;
            fields.push(FieldDecl {
                name: fname,
                ty,
                span: self.span_from(&fstart).into(),
            });
        }
        self.expect_punct("}")?;
        Ok(StructureDecl {
            name,
            fields,
            span: self.span_from(&start).into(),
        })
    }

    fn list_type(&mut self) -> PResult<ListDecl> {
        let start = self.expect_kw("list")?.span;
        let name = self.ident()?;
        self.expect_punct("{")?;
        self.expect_kw("element")?;
        let element = self.type_expr(false)?;
        self.expect_punct("}")?;
        Ok(ListDecl {
            name,
            element,
            span: self.span_from(&start).into(),
        })
    }

    // Service viewpoint

    fn microservice(&mut self) -> PResult<MicroserviceDecl> {
        let start = self.peek().span.clone();
        let kind = if self.eat_kw("functional") {
            MicroserviceType::Functional
        } else {
            self.expect_kw("infrastructure")?;
            MicroserviceType::Infrastructure
        };
        self.expect_kw("microservice")?;
        let name = self.qname()?;
        self.expect_punct("{")?;
        let mut interfaces = Vec::new();
        let mut contracts = Vec::new();
        loop {
            if self.at_kw("interface") {
                interfaces.push(self.interface()?);
            } else if self.at_kw("contract") {
                contracts.push(self.contract()?);
            } else if self.at_punct("}") {
                break;
            } else {
                return self.unexpected("`interface`, `contract` or `}`");
            }
        }
        self.expect_punct("}")?;
        Ok(MicroserviceDecl {
            kind,
            name,
            interfaces,
            contracts,
            span: self.span_from(&start).into(),
        })
    }

    fn interface(&mut self) -> PResult<InterfaceDecl> {
        let start = self.expect_kw("interface")?.span;
        let name = self.ident()?;
        self.expect_punct("{")?;
        let mut operations = Vec::new();
        while !self.at_punct("}") {
            operations.push(self.operation()?);
        }
        self.expect_punct("}")?;
        Ok(InterfaceDecl {
            name,
            operations,
            span: self.span_from(&start).into(),
        })
    }

    fn operation(&mut self) -> PResult<OperationDecl> {
        let start = self.peek().span.clone();
        let not_implemented = self.eat_kw("not-implemented");
        if !self.at_kw("operation") {
            let expected = if not_implemented {
                "`operation`"
            } else {
                "`operation`, `not-implemented` or `}`"
            };
            return self.unexpected(expected);
        }
        self.bump();
        let name = self.ident()?;
        self.expect_punct("(")?;
        let mut params = Vec::new();
        if !self.at_punct(")") {
            params.push(self.parameter()?);
            while self.eat_punct(",") {
                params.push(self.parameter()?);
            }
        }
        self.expect_punct(")")?;
        Ok(OperationDecl {
            name,
            not_implemented,
            params,
            span: self.span_from(&start).into(),
        })
    }

    fn parameter(&mut self) -> PResult<ParamDecl> {
        let start = self.peek().span.clone();
        let pattern = if self.eat_kw("in") {
            CommPattern::InOnly
        } else if self.eat_kw("out") {
            CommPattern::OutOnly
        } else if self.eat_kw("inout") {
            CommPattern::InOut
        } else {
            return self.unexpected("`in`, `out` or `inout`");
        };
        let comm_type = if self.eat_kw("sync") {
            CommType::Sync
        } else if self.eat_kw("async") {
            CommType::Async
        } else {
            return self.unexpected("`sync` or `async`");
        };
        let name = self.ident()?;
        self.expect_punct(":")?;
        let ty = self.type_expr(true)?;
        let initialized_by = if self.eat_kw("initialized") {
            self.expect_kw("by")?;
            Some(self.qname()?)
        } else {
            None
        };
        Ok(ParamDecl {
            pattern,
            comm_type,
            name,
            ty,
            initialized_by,
            span: self.span_from(&start).into(),
        })
    }

    fn contract(&mut self) -> PResult<ContractDecl> {
        let start = self.expect_kw("contract")?.span;
        let name = self.ident()?;
        self.expect_punct("{")?;
        let mut provides: Option<Vec<NameRef>> = None;
        let mut requires: Option<Vec<NameRef>> = None;
        loop {
            if self.at_kw("provides") || self.at_kw("requires") {
                let kw = self.bump();
                let names = self.qname_list()?;
                let slot = if kw.text == "provides" {
                    &mut provides
                } else {
                    &mut requires
                };
                if slot.is_some() {
                    self.duplicate_clause(&kw.text, kw.span);
                } else {
                    *slot = Some(names);
                }
            } else if self.at_punct("}") {
                break;
            } else {
                return self.unexpected("`provides`, `requires` or `}`");
            }
        }
        self.expect_punct("}")?;
        if provides.is_none() {
            self.missing_clause("provides", "a contract", name.span.get().clone());
        }
        Ok(ContractDecl {
            name,
            provides: provides.unwrap_or_default(),
            requires: requires.unwrap_or_default(),
            span: self.span_from(&start).into(),
        })
    }

    // Operation viewpoint

    fn technology(&mut self) -> PResult<TechnologyDecl> {
        let start = self.expect_kw("technology")?.span;
        let name = self.ident()?;
        self.expect_punct(":")?;
        let tok = self.peek();
        let kind = match (tok.kind, TechnologyKind::from_keyword(&tok.text)) {
            (TokenKind::Keyword, Some(kind)) => kind,
            _ => {
                return self.unexpected(
                    "a technology kind (`service`, `container`, `protocol`, `message-format`, `load-balancer` or `circuit-breaker`)",
                )
            }
        };
        self.bump();
        Ok(TechnologyDecl {
            name,
            kind,
            span: self.span_from(&start).into(),
        })
    }

    fn artifact(&mut self) -> PResult<ArtifactDecl> {
        let start = self.expect_kw("artifact")?.span;
        let name = self.ident()?;
        self.expect_punct("{")?;
        let mut decl = ArtifactDecl {
            name,
            contracts: Vec::new(),
            services: Vec::new(),
            load_balancer: None,
            circuit_breaker: None,
            endpoints: Vec::new(),
            span: Default::default(),
        };
        loop {
            let tok = self.peek().clone();
            if tok.is_keyword("contracts") {
                self.bump();
                decl.contracts.extend(self.qname_list()?);
            } else if tok.is_keyword("service") {
                self.bump();
                decl.services.push(self.qname()?);
            } else if tok.is_keyword("load-balancer") || tok.is_keyword("circuit-breaker") {
                self.bump();
                let tech = self.qname()?;
                let slot = if tok.text == "load-balancer" {
                    &mut decl.load_balancer
                } else {
                    &mut decl.circuit_breaker
                };
                if slot.is_some() {
                    self.duplicate_clause(&tok.text, tok.span);
                } else {
                    *slot = Some(tech);
                }
            } else if tok.is_keyword("endpoint") {
                decl.endpoints.push(self.endpoint()?);
            } else if tok.is_punct("}") {
                break;
            } else {
                return self.unexpected(
                    "`contracts`, `service`, `load-balancer`, `circuit-breaker`, `endpoint` or `}`",
                );
            }
        }
        self.expect_punct("}")?;
        if decl.contracts.is_empty() {
            self.missing_clause("contracts", "an artifact", decl.name.span.get().clone());
        }
        decl.span = self.span_from(&start).into();
        Ok(decl)
    }

    fn endpoint(&mut self) -> PResult<EndpointDecl> {
        let start = self.expect_kw("endpoint")?.span;
        let address = self.string()?;
        self.expect_kw("protocol")?;
        let protocol = self.qname()?;
        self.expect_kw("format")?;
        let format = self.qname()?;
        let mut operation = None;
        let mut contract = None;
        if self.eat_kw("for") {
            loop {
                let tok = self.peek().clone();
                let slot = if tok.is_keyword("operation") {
                    &mut operation
                } else if tok.is_keyword("contract") {
                    &mut contract
                } else {
                    return self.unexpected("`operation` or `contract`");
                };
                self.bump();
                let target = self.qname()?;
                if slot.is_some() {
                    self.duplicate_clause(&tok.text, tok.span);
                } else {
                    *slot = Some(target);
                }
                if !self.eat_punct(",") {
                    break;
                }
            }
        }
        Ok(EndpointDecl {
            address,
            protocol,
            format,
            operation,
            contract,
            span: self.span_from(&start).into(),
        })
    }

    fn environment(&mut self) -> PResult<EnvironmentDecl> {
        let start = self.expect_kw("environment")?.span;
        let image = self.string()?;
        let mut containers: Option<Vec<NameRef>> = None;
        let mut services: Option<Vec<NameRef>> = None;
        while self.at_kw("container") || self.at_kw("service") {
            let kw = self.bump();
            let names = self.qname_list()?;
            let slot = if kw.text == "container" {
                &mut containers
            } else {
                &mut services
            };
            if slot.is_some() {
                self.duplicate_clause(&kw.text, kw.span);
            } else {
                *slot = Some(names);
            }
        }
        let span = self.span_from(&start);
        if containers.is_none() {
            self.missing_clause("container", "an environment", span.clone());
        }
        if services.is_none() {
            self.missing_clause("service", "an environment", span.clone());
        }
        Ok(EnvironmentDecl {
            image,
            containers: containers.unwrap_or_default(),
            services: services.unwrap_or_default(),
            span: span.into(),
        })
    }

    fn container(&mut self) -> PResult<ContainerDecl> {
        let start = self.expect_kw("container")?.span;
        let name = self.ident()?;
        self.expect_punct("{")?;
        let mut environment = None;
        let mut instances = None;
        let mut deploys = Vec::new();
        loop {
            let tok = self.peek().clone();
            if tok.is_keyword("environment") {
                let env = self.environment()?;
                if environment.is_some() {
                    self.duplicate_clause("environment", tok.span);
                } else {
                    environment = Some(env);
                }
            } else if tok.is_keyword("instances") {
                self.bump();
                let min = self.int()?;
                self.expect_punct("..")?;
                let max = self.int()?;
                if instances.is_some() {
                    self.duplicate_clause("instances", tok.span);
                } else {
                    instances = Some((min, max));
                }
            } else if tok.is_keyword("deploys") {
                self.bump();
                deploys.extend(self.qname_list()?);
            } else if tok.is_punct("}") {
                break;
            } else {
                return self.unexpected("`environment`, `instances`, `deploys` or `}`");
            }
        }
        self.expect_punct("}")?;
        let environment = environment.unwrap_or_else(|| {
            self.missing_clause("environment", "a container", name.span.get().clone());
            EnvironmentDecl {
                image: String::new(),
                containers: Vec::new(),
                services: Vec::new(),
                span: name.span.clone(),
            }
        });
        if deploys.is_empty() {
            self.missing_clause("deploys", "a container", name.span.get().clone());
        }
        Ok(ContainerDecl {
            name,
            environment,
            instances,
            deploys,
            span: self.span_from(&start).into(),
        })
    }

    fn registration(&mut self) -> PResult<RegistrationDecl> {
        let start = self.peek().span.clone();
        let kind = if self.eat_kw("service-discovery") {
            RegistrationKind::ServiceDiscovery
        } else {
            self.expect_kw("api-gateway")?;
            RegistrationKind::ApiGateway
        };
        let name = self.ident()?;
        self.expect_kw("registers")?;
        let registered = self.qname_list()?;
        Ok(RegistrationDecl {
            kind,
            name,
            registered,
            span: self.span_from(&start).into(),
        })
    }
}
