//! Append-only event storage, one JSON record per line.

use std::fs::{File, OpenOptions, TryLockError};
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use super::event::RepositoryEvent;

#[derive(Debug, Error)]
pub enum JournalError {
    #[error("journal I/O: {0}")]
    Io(#[from] io::Error),
    #[error("journal {path} is locked by another process")]
    Locked { path: PathBuf },
    #[error("journal line {line} is corrupt: {reason}")]
    Corrupt { line: usize, reason: String },
}

pub trait Journal {
    /// Every record stored so far, in order.
    fn load(&mut self) -> Result<Vec<RepositoryEvent>, JournalError>;
    /// Stores `event` durably before returning.
    fn append(&mut self, event: &RepositoryEvent) -> Result<(), JournalError>;
}

impl<J: Journal + ?Sized> Journal for Box<J> {
    fn load(&mut self) -> Result<Vec<RepositoryEvent>, JournalError> {
        (**self).load()
    }

    fn append(&mut self, event: &RepositoryEvent) -> Result<(), JournalError> {
        (**self).append(event)
    }
}

#[derive(Debug, Default, Clone)]
pub struct MemoryJournal {
    events: Vec<RepositoryEvent>,
}

impl MemoryJournal {
    pub fn new() -> Self {
        MemoryJournal::default()
    }

    pub fn events(&self) -> &[RepositoryEvent] {
        &self.events
    }
}

impl Journal for MemoryJournal {
    fn load(&mut self) -> Result<Vec<RepositoryEvent>, JournalError> {
        Ok(self.events.clone())
    }

    fn append(&mut self, event: &RepositoryEvent) -> Result<(), JournalError> {
        self.events.push(event.clone());
        Ok(())
    }
}

/// A journal file held under an exclusive lock for the lifetime of the value.
#[derive(Debug)]
pub struct FileJournal {
    path: PathBuf,
    file: File,
}

impl FileJournal {
    pub fn open(path: impl AsRef<Path>) -> Result<Self, JournalError> {
        let path = path.as_ref().to_path_buf();
        let file = OpenOptions::new().read(true).append(true).create(true).open(&path)?;
        match file.try_lock() {
            Ok(()) => {}
            Err(TryLockError::WouldBlock) => return Err(JournalError::Locked { path }),
            Err(TryLockError::Error(e)) => return Err(e.into()),
        }
        Ok(FileJournal { path, file })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }
}

impl Journal for FileJournal {
    /// A final line without a newline that does not parse is a torn write and
    /// is cut off; any other bad line is corruption.
    fn load(&mut self) -> Result<Vec<RepositoryEvent>, JournalError> {
        let mut text = String::new();
        (&self.file).read_to_string(&mut text).map_err(|e| match e.kind() {
            io::ErrorKind::InvalidData => JournalError::Corrupt {
                line: 0,
                reason: "journal is not UTF-8".into(),
            },
            _ => e.into(),
        })?;
        let mut events = Vec::new();
        let mut offset = 0usize;
        for (i, raw) in text.split_inclusive('\n').enumerate() {
            let terminated = raw.ends_with('\n');
            let line = raw.trim_end_matches(['\n', '\r']);
            if line.trim().is_empty() {
                offset += raw.len();
                continue;
            }
            match serde_json::from_str::<RepositoryEvent>(line) {
                Ok(event) => {
                    events.push(event);
                    if !terminated {
                        self.file.write_all(b"\n")?;
                        self.file.sync_data()?;
                    }
                }
                Err(_) if !terminated => {
                    self.file.set_len(offset as u64)?;
                    self.file.sync_data()?;
                    break;
                }
                Err(e) => {
                    return Err(JournalError::Corrupt {
                        line: i + 1,
                        reason: e.to_string(),
                    })
                }
            }
            offset += raw.len();
        }
        Ok(events)
    }

    fn append(&mut self, event: &RepositoryEvent) -> Result<(), JournalError> {
        let mut line = serde_json::to_string(event).map_err(io::Error::other)?;
        line.push('\n');
        self.file.write_all(line.as_bytes())?;
        self.file.flush()?;
        self.file.sync_data()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{listing1_time, repo};
    use crate::repository::event::{EventKind, VotePosition};

    fn vote(sequence: u64) -> RepositoryEvent {
        RepositoryEvent {
            sequence,
            at: listing1_time(),
            kind: EventKind::VoteCast {
                patch_id: repo("patch/1"),
                agent: repo("a"),
                position: VotePosition::Advocate,
            },
        }
    }

    #[test]
    fn file_round_trip_and_lock() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("journal.jsonl");
        {
            let mut j = FileJournal::open(&path).unwrap();
            assert!(j.load().unwrap().is_empty());
            j.append(&vote(1)).unwrap();
            j.append(&vote(2)).unwrap();
            assert!(matches!(FileJournal::open(&path), Err(JournalError::Locked { .. })));
        }
        let mut j = FileJournal::open(&path).unwrap();
        assert_eq!(j.load().unwrap(), vec![vote(1), vote(2)]);
    }

    #[test]
    fn torn_tail_is_truncated() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("journal.jsonl");
        let good = serde_json::to_string(&vote(1)).unwrap();
        std::fs::write(&path, format!("{good}\n{{\"sequence\":2,\"at")).unwrap();
        let mut j = FileJournal::open(&path).unwrap();
        assert_eq!(j.load().unwrap(), vec![vote(1)]);
        j.append(&vote(2)).unwrap();
        drop(j);
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert_eq!(FileJournal::open(&path).unwrap().load().unwrap(), vec![vote(1), vote(2)]);
    }

    #[test]
    fn unterminated_valid_tail_is_kept() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("journal.jsonl");
        std::fs::write(&path, serde_json::to_string(&vote(1)).unwrap()).unwrap();
        let mut j = FileJournal::open(&path).unwrap();
        assert_eq!(j.load().unwrap(), vec![vote(1)]);
        j.append(&vote(2)).unwrap();
        drop(j);
        assert_eq!(FileJournal::open(&path).unwrap().load().unwrap().len(), 2);
    }

    #[test]
    fn corrupt_middle_line_reported() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("journal.jsonl");
        let good = serde_json::to_string(&vote(1)).unwrap();
        std::fs::write(&path, format!("{good}\nnot json\n{good}\n")).unwrap();
        match FileJournal::open(&path).unwrap().load() {
            Err(JournalError::Corrupt { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }
}
