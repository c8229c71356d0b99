//! Name-keyed registry of interchangeable strategy objects.

use std::collections::BTreeMap;

/// Anything stored in a [`Registry`] reports its own key.
pub trait Named {
    fn name(&self) -> &'static str;
}

pub struct Registry<T: ?Sized + Named> {
    entries: BTreeMap<&'static str, Box<T>>,
    default: Option<&'static str>,
}

impl<T: ?Sized + Named> Default for Registry<T> {
    fn default() -> Self {
        Registry {
            entries: BTreeMap::new(),
            default: None,
        }
    }
}

impl<T: ?Sized + Named> Registry<T> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds an entry; the first entry registered becomes the default.
    /// Re-registering a name replaces the previous entry.
    pub fn register(&mut self, item: Box<T>) -> &mut Self {
        let name = item.name();
        self.default.get_or_insert(name);
        self.entries.insert(name, item);
        self
    }

    pub fn get(&self, name: &str) -> Option<&T> {
        self.entries.get(name).map(|b| b.as_ref())
    }

    pub fn default_entry(&self) -> Option<&T> {
        self.default.and_then(|d| self.get(d))
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.keys().copied().collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    trait Greeter: Named {
        fn greet(&self) -> String;
    }

    struct Hello;
    struct Hi;

    impl Named for Hello {
        fn name(&self) -> &'static str {
            "hello"
        }
    }
    impl Greeter for Hello {
        fn greet(&self) -> String {
            "hello".into()
        }
    }
    impl Named for Hi {
        fn name(&self) -> &'static str {
            "hi"
        }
    }
    impl Greeter for Hi {
        fn greet(&self) -> String {
            "hi".into()
        }
    }

    #[test]
    fn lookup_and_default() {
        let mut r: Registry<dyn Greeter> = Registry::new();
        r.register(Box::new(Hi)).register(Box::new(Hello));
        assert_eq!(r.names(), vec!["hello", "hi"]);
        assert_eq!(r.default_entry().unwrap().greet(), "hi");
        assert_eq!(r.get("hello").unwrap().greet(), "hello");
        assert!(r.get("howdy").is_none());
    }
}
