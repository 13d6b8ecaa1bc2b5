//! Keyed memo used by the lattice samplers. Without `std` nothing is kept.

use alloc::sync::Arc;

#[cfg(feature = "std")]
pub(crate) struct Memo<T> {
    slots: std::sync::Mutex<alloc::vec::Vec<(u64, Arc<T>)>>,
    capacity: usize,
}

#[cfg(feature = "std")]
impl<T> Memo<T> {
    pub(crate) fn new(capacity: usize) -> Self {
        Self { slots: std::sync::Mutex::new(alloc::vec::Vec::new()), capacity: capacity.max(1) }
    }

    pub(crate) fn get_or_try<E>(
        &self,
        key: u64,
        make: impl FnOnce() -> Result<T, E>,
    ) -> Result<Arc<T>, E> {
        if let Some(hit) = self.lookup(key) {
            return Ok(hit);
        }
        // computed outside the lock; a racing duplicate is harmless
        let value = Arc::new(make()?);
        let mut slots = self.slots.lock().unwrap_or_else(|p| p.into_inner());
        if !slots.iter().any(|(k, _)| *k == key) {
            if slots.len() == self.capacity {
                slots.remove(0);
            }
            slots.push((key, value.clone()));
        }
        Ok(value)
    }

    fn lookup(&self, key: u64) -> Option<Arc<T>> {
        let slots = self.slots.lock().unwrap_or_else(|p| p.into_inner());
        slots.iter().find(|(k, _)| *k == key).map(|(_, v)| v.clone())
    }
}

#[cfg(not(feature = "std"))]
pub(crate) struct Memo<T> {
    _marker: core::marker::PhantomData<fn() -> T>,
}

#[cfg(not(feature = "std"))]
impl<T> Memo<T> {
    pub(crate) fn new(_capacity: usize) -> Self {
        Self { _marker: core::marker::PhantomData }
    }

    pub(crate) fn get_or_try<E>(
        &self,
        _key: u64,
        make: impl FnOnce() -> Result<T, E>,
    ) -> Result<Arc<T>, E> {
        make().map(Arc::new)
    }
}
