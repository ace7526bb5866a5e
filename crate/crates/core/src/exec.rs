//! Chunked evaluation hook. Core routines split their work into indexed
//! chunks and combine the results in index order; an executor only decides
//! how the chunks are computed.

use alloc::vec::Vec;

pub trait ChunkMap {
    /// `[f(0), f(1), ..., f(count - 1)]`, in this order.
    fn map_chunks<T: Send, F: Fn(usize) -> T + Sync>(&self, count: usize, f: F) -> Vec<T>;
}

/// Evaluates chunks one after another on the calling thread.
#[derive(Clone, Copy, Debug, Default)]
pub struct Sequential;

impl ChunkMap for Sequential {
    fn map_chunks<T: Send, F: Fn(usize) -> T + Sync>(&self, count: usize, f: F) -> Vec<T> {
        (0..count).map(f).collect()
    }
}
