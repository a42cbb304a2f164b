//! The single writer: one thread owns the repository and applies commands in
//! arrival order; readers see immutable snapshots.

use std::sync::mpsc;
use std::sync::Arc;
use std::thread;

use chrono::Utc;
use patchr_core::{
    Journal, PatchBody, PatchGroup, PatchStatus, Repository, RepositoryError, RepositoryState, SubmitOutcome,
    VotePosition,
};
use patchr_rdf::Iri;
use tokio::sync::{oneshot, watch};

enum Command {
    Submit { body: Box<PatchBody>, submitter: Iri },
    Vote { patch: Iri, agent: Iri, position: VotePosition },
    Status { patch: Iri, status: PatchStatus, agent: Iri },
    CreateGroup { group: PatchGroup },
    AssignGroup { patch: Iri, group: Iri },
}

enum Reply {
    Submitted(SubmitOutcome),
    Done,
}

type Envelope = (Command, oneshot::Sender<Result<Reply, RepositoryError>>);

#[derive(Clone)]
pub struct RepoHandle {
    tx: mpsc::Sender<Envelope>,
    snapshot: watch::Receiver<Arc<RepositoryState>>,
    base: Iri,
}

impl RepoHandle {
    /// Replays `journal` and starts the writer thread.
    pub fn start<J: Journal + Send + 'static>(journal: J, base: Iri) -> Result<Self, RepositoryError> {
        let mut repo = Repository::open(journal, base.clone())?;
        let (snap_tx, snapshot) = watch::channel(Arc::new(repo.state().clone()));
        let (tx, rx) = mpsc::channel::<Envelope>();
        thread::Builder::new()
            .name("patchr-writer".into())
            .spawn(move || {
                for (command, reply) in rx {
                    let result = execute(&mut repo, command);
                    if result.is_ok() {
                        snap_tx.send_replace(Arc::new(repo.state().clone()));
                    }
                    let _ = reply.send(result);
                }
            })
            .expect("spawn writer thread");
        Ok(RepoHandle { tx, snapshot, base })
    }

    pub fn snapshot(&self) -> Arc<RepositoryState> {
        self.snapshot.borrow().clone()
    }

    pub fn base(&self) -> &Iri {
        &self.base
    }

    async fn send(&self, command: Command) -> Result<Reply, RepositoryError> {
        let (reply_tx, reply_rx) = oneshot::channel();
        self.tx
            .send((command, reply_tx))
            .map_err(|_| RepositoryError::Invalid("repository writer stopped".into()))?;
        reply_rx
            .await
            .map_err(|_| RepositoryError::Invalid("repository writer stopped".into()))?
    }

    pub async fn submit(&self, body: PatchBody, submitter: Iri) -> Result<SubmitOutcome, RepositoryError> {
        match self.send(Command::Submit { body: Box::new(body), submitter }).await? {
            Reply::Submitted(outcome) => Ok(outcome),
            Reply::Done => unreachable!("submit replies with an outcome"),
        }
    }

    pub async fn vote(&self, patch: Iri, agent: Iri, position: VotePosition) -> Result<(), RepositoryError> {
        self.send(Command::Vote { patch, agent, position }).await.map(drop)
    }

    pub async fn change_status(&self, patch: Iri, status: PatchStatus, agent: Iri) -> Result<(), RepositoryError> {
        self.send(Command::Status { patch, status, agent }).await.map(drop)
    }

    pub async fn create_group(&self, group: PatchGroup) -> Result<(), RepositoryError> {
        self.send(Command::CreateGroup { group }).await.map(drop)
    }

    pub async fn assign_group(&self, patch: Iri, group: Iri) -> Result<(), RepositoryError> {
        self.send(Command::AssignGroup { patch, group }).await.map(drop)
    }
}

fn execute<J: Journal>(repo: &mut Repository<J>, command: Command) -> Result<Reply, RepositoryError> {
    let now = Utc::now();
    match command {
        Command::Submit { body, submitter } => repo.submit_patch(&body, &submitter, now).map(Reply::Submitted),
        Command::Vote { patch, agent, position } => repo.cast_vote(&patch, &agent, position, now).map(|_| Reply::Done),
        Command::Status { patch, status, agent } => {
            repo.change_status(&patch, status, &agent, now).map(|_| Reply::Done)
        }
        Command::CreateGroup { group } => repo.create_group(&group, now).map(|_| Reply::Done),
        Command::AssignGroup { patch, group } => repo.assign_group(&patch, &group, now).map(|_| Reply::Done),
    }
}
