use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::TermError;
use crate::term::{Iri, Term};

/// An RDF statement. The subject is never a literal.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawTriple")]
pub struct Triple {
    subject: Term,
    predicate: Iri,
    object: Term,
}

#[derive(Deserialize)]
struct RawTriple {
    subject: Term,
    predicate: Iri,
    object: Term,
}

impl TryFrom<RawTriple> for Triple {
    type Error = TermError;

    fn try_from(raw: RawTriple) -> Result<Self, Self::Error> {
        Triple::new(raw.subject, raw.predicate, raw.object)
    }
}

impl Triple {
    pub fn new(subject: impl Into<Term>, predicate: Iri, object: impl Into<Term>) -> Result<Self, TermError> {
        let subject = subject.into();
        if matches!(subject, Term::Literal(_)) {
            return Err(TermError::LiteralSubject);
        }
        Ok(Triple {
            subject,
            predicate,
            object: object.into(),
        })
    }

    pub fn subject(&self) -> &Term {
        &self.subject
    }

    pub fn predicate(&self) -> &Iri {
        &self.predicate
    }

    pub fn object(&self) -> &Term {
        &self.object
    }

    pub fn is_ground(&self) -> bool {
        !self.subject.is_blank() && !self.object.is_blank()
    }

    /// One N-Triples line, without the trailing newline.
    pub fn to_ntriples(&self) -> String {
        let mut out = String::new();
        self.subject.write_ntriples(&mut out);
        out.push_str(" <");
        out.push_str(self.predicate.as_str());
        out.push_str("> ");
        self.object.write_ntriples(&mut out);
        out.push_str(" .");
        out
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_ntriples())
    }
}
