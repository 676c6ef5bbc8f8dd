//! Per-thread memo for precision-dependent constant tables.

use std::any::{Any, TypeId};
use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

thread_local! {
    static TABLES: RefCell<HashMap<(TypeId, &'static str, usize), Rc<dyn Any>>> =
        RefCell::new(HashMap::new());
}

/// Build `make()` once per thread, value type, key and size hint.
pub(crate) fn cached<V: 'static>(key: &'static str, size: usize, make: impl FnOnce() -> V) -> Rc<V> {
    let id = (TypeId::of::<V>(), key, size);
    if let Some(hit) = TABLES.with(|t| t.borrow().get(&id).cloned()) {
        return hit.downcast::<V>().expect("cache entry keyed by its own type");
    }
    let value = Rc::new(make());
    TABLES.with(|t| t.borrow_mut().insert(id, value.clone() as Rc<dyn Any>));
    value
}
