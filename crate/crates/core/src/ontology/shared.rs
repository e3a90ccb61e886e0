use std::sync::{Arc, Mutex, RwLock};

use super::store::TripleStore;

/// Single-writer, multi-reader handle. Readers take a cheap `Arc` snapshot;
/// writers build a modified copy and publish it with one pointer swap.
#[derive(Debug, Default)]
pub struct SharedOntology {
    current: RwLock<Arc<TripleStore>>,
    writer: Mutex<()>,
}

impl SharedOntology {
    pub fn new(store: TripleStore) -> Self {
        SharedOntology {
            current: RwLock::new(Arc::new(store)),
            writer: Mutex::new(()),
        }
    }

    pub fn snapshot(&self) -> Arc<TripleStore> {
        self.current.read().unwrap_or_else(|e| e.into_inner()).clone()
    }

    /// Applies `f` to a copy of the current store; on `Ok` the copy is
    /// published, on `Err` nothing changes.
    pub fn update<T, E>(&self, f: impl FnOnce(&mut TripleStore) -> Result<T, E>) -> Result<T, E> {
        let _guard = self.writer.lock().unwrap_or_else(|e| e.into_inner());
        let mut next = (*self.snapshot()).clone();
        let out = f(&mut next)?;
        *self.current.write().unwrap_or_else(|e| e.into_inner()) = Arc::new(next);
        Ok(out)
    }

    pub fn replace(&self, store: TripleStore) {
        let _guard = self.writer.lock().unwrap_or_else(|e| e.into_inner());
        *self.current.write().unwrap_or_else(|e| e.into_inner()) = Arc::new(store);
    }
}
