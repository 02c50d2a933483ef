use std::collections::HashMap;
use std::sync::RwLock;

/// Default number of memoised buffers.
pub const DEFAULT_CACHE_SIZE: usize = 65_536;

/// Memoised compressed lengths keyed by the exact packed buffer.
///
/// Inserts stop once `max_size` entries are held; nothing is evicted.
#[derive(Debug)]
pub struct CompressorCache {
    entries: RwLock<HashMap<Vec<u8>, usize>>,
    max_size: usize,
}

impl Default for CompressorCache {
    fn default() -> Self {
        Self::new(DEFAULT_CACHE_SIZE)
    }
}

impl CompressorCache {
    pub fn new(max_size: usize) -> Self {
        Self { entries: RwLock::default(), max_size }
    }

    pub fn max_size(&self) -> usize {
        self.max_size
    }

    pub fn len(&self) -> usize {
        self.entries.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, buf: &[u8]) -> Option<usize> {
        self.entries.read().unwrap().get(buf).copied()
    }

    /// Returns whether the entry was stored.
    pub fn insert(&self, buf: Vec<u8>, len: usize) -> bool {
        let mut entries = self.entries.write().unwrap();
        if entries.len() >= self.max_size && !entries.contains_key(&buf) {
            return false;
        }
        entries.insert(buf, len);
        true
    }
}

/// Raw DEFLATE at the fastest level.
pub fn compressed_len(buf: &[u8]) -> usize {
    miniz_oxide::deflate::compress_to_vec(buf, 1).len()
}

/// Compressed byte length of a token chunk, one byte per token. Empty chunks
/// have length 0. Results are memoised in `cache`.
pub fn compress_subchunk(chunk: &[u8], cache: &CompressorCache) -> usize {
    if chunk.is_empty() {
        return 0;
    }
    if let Some(len) = cache.get(chunk) {
        return len;
    }
    let len = compressed_len(chunk);
    cache.insert(chunk.to_vec(), len);
    len
}
