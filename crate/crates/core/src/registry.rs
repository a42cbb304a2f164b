//! Name-keyed collections of interchangeable strategies.

use std::fmt;

/// A strategy that can be selected by name.
pub trait Named {
    fn name(&self) -> &'static str;
}

/// Strategies in registration order; names are unique and case-insensitive.
pub struct Registry<T: ?Sized + Named> {
    entries: Vec<Box<T>>,
}

impl<T: ?Sized + Named> Registry<T> {
    pub fn new() -> Self {
        Registry { entries: Vec::new() }
    }

    /// Adds `strategy`, replacing any entry with the same name.
    pub fn register(&mut self, strategy: Box<T>) {
        match self.entries.iter().position(|e| e.name().eq_ignore_ascii_case(strategy.name())) {
            Some(i) => self.entries[i] = strategy,
            None => self.entries.push(strategy),
        }
    }

    pub fn get(&self, name: &str) -> Option<&T> {
        self.entries
            .iter()
            .find(|e| e.name().eq_ignore_ascii_case(name))
            .map(|e| &**e)
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|e| e.name()).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &T> {
        self.entries.iter().map(|e| &**e)
    }
}

impl<T: ?Sized + Named> Default for Registry<T> {
    fn default() -> Self {
        Registry::new()
    }
}

impl<T: ?Sized + Named> fmt::Debug for Registry<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.names()).finish()
    }
}
