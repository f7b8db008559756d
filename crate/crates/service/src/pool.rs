//! Fixed set of worker threads with warm per-worker state and a bounded FIFO queue.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::thread::JoinHandle;
use std::time::{Duration, Instant};

use crossbeam_channel::{bounded, Sender, TrySendError};
use thiserror::Error;
use tokio::sync::oneshot;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum PoolError {
    #[error("worker queue is full")]
    Saturated,
    #[error("job waited longer than the queue timeout")]
    QueueTimeout,
    #[error("worker failed before finishing the job")]
    WorkerLost,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Completed<R> {
    pub value: R,
    /// Time spent waiting in the queue.
    pub queued: Duration,
    /// Wall time of the job itself.
    pub run: Duration,
}

type Task<S> = Box<dyn FnOnce(Option<&S>, Duration) + Send>;

struct Job<S> {
    enqueued: Instant,
    task: Task<S>,
}

pub struct WorkerPool<S> {
    tx: Option<Sender<Job<S>>>,
    workers: Vec<JoinHandle<()>>,
    depth: usize,
}

/// Pending result of a submitted job.
pub struct Ticket<R>(oneshot::Receiver<Result<Completed<R>, PoolError>>);

impl<R> Ticket<R> {
    pub async fn wait(self) -> Result<Completed<R>, PoolError> {
        self.0.await.unwrap_or(Err(PoolError::WorkerLost))
    }

    /// For callers outside an async runtime.
    pub fn wait_blocking(self) -> Result<Completed<R>, PoolError> {
        self.0.blocking_recv().unwrap_or(Err(PoolError::WorkerLost))
    }
}

impl<S: Send + 'static> WorkerPool<S> {
    /// Builds one state per worker with `factory` on the calling thread,
    /// then starts the workers. Jobs dequeued after `queue_timeout` fail with
    /// [`PoolError::QueueTimeout`] without running.
    pub fn new<E>(
        workers: usize,
        depth: usize,
        queue_timeout: Duration,
        mut factory: impl FnMut(usize) -> Result<S, E>,
    ) -> Result<Self, E> {
        assert!(workers > 0 && depth > 0, "pool needs at least one worker and one queue slot");
        let states = (0..workers).map(&mut factory).collect::<Result<Vec<_>, E>>()?;
        let (tx, rx) = bounded::<Job<S>>(depth);
        let workers = states
            .into_iter()
            .enumerate()
            .map(|(i, state)| {
                let rx = rx.clone();
                std::thread::Builder::new()
                    .name(format!("synth-worker-{i}"))
                    .spawn(move || {
                        for job in rx.iter() {
                            let queued = job.enqueued.elapsed();
                            let state = (queued <= queue_timeout).then_some(&state);
                            // A panicking job drops its reply channel; the worker keeps going.
                            let _ = catch_unwind(AssertUnwindSafe(|| (job.task)(state, queued)));
                        }
                    })
                    .expect("spawn worker thread")
            })
            .collect();
        Ok(Self { tx: Some(tx), workers, depth })
    }
}

impl<S> WorkerPool<S> {
    pub fn workers(&self) -> usize {
        self.workers.len()
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Jobs waiting for a worker.
    pub fn queued(&self) -> usize {
        self.tx.as_ref().map_or(0, |tx| tx.len())
    }

    /// Enqueues `f` without blocking; fails fast when the queue is full.
    pub fn submit<R, F>(&self, f: F) -> Result<Ticket<R>, PoolError>
    where
        R: Send + 'static,
        F: FnOnce(&S) -> R + Send + 'static,
    {
        let (reply, rx) = oneshot::channel();
        let task: Task<S> = Box::new(move |state, queued| {
            let result = match state {
                Some(state) => {
                    let start = Instant::now();
                    let value = f(state);
                    Ok(Completed { value, queued, run: start.elapsed() })
                }
                None => Err(PoolError::QueueTimeout),
            };
            let _ = reply.send(result);
        });
        let tx = self.tx.as_ref().ok_or(PoolError::WorkerLost)?;
        match tx.try_send(Job { enqueued: Instant::now(), task }) {
            Ok(()) => Ok(Ticket(rx)),
            Err(TrySendError::Full(_)) => Err(PoolError::Saturated),
            Err(TrySendError::Disconnected(_)) => Err(PoolError::WorkerLost),
        }
    }
}

impl<S> Drop for WorkerPool<S> {
    fn drop(&mut self) {
        self.tx.take();
        for w in self.workers.drain(..) {
            let _ = w.join();
        }
    }
}
