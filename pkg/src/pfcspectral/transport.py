"""In-process worker group with barriers, tagged messaging and all-to-all.

Workers emulate the devices of a multi-accelerator setup: G threads that
share nothing but this transport. Payloads are handed over by reference
and must not be mutated by the sender after ``send`` (exclusive handoff).
The transport is deliberately small so an inter-process backend could be
substituted without touching solver code.
"""

from __future__ import annotations

import threading
from collections import deque
from typing import Any, Callable, Sequence

__all__ = [
    "TransportError",
    "DeadlockError",
    "WorkerFailure",
    "Worker",
    "WorkerGroup",
    "spawn_group",
]

DEFAULT_TIMEOUT = 30.0


class TransportError(RuntimeError):
    """Protocol violation or cancelled collective."""


class DeadlockError(TransportError):
    """A blocking operation timed out; names the endpoints involved."""


class WorkerFailure(TransportError):
    """A worker body raised; carries the originating rank."""

    def __init__(self, rank: int, cause: BaseException):
        super().__init__(f"worker {rank} failed: {cause!r}")
        self.rank = rank
        self.cause = cause


class WorkerGroup:
    """Shared state for G cooperating workers."""

    def __init__(self, size: int, timeout: float = DEFAULT_TIMEOUT,
                 channel_capacity: int = 64):
        if size < 1:
            raise ValueError(f"group size must be >= 1, got {size}")
        self.size = size
        self.timeout = timeout
        self.channel_capacity = channel_capacity
        self._cond = threading.Condition()
        self._channels: dict[tuple[int, int, int], deque] = {}
        # barrier bookkeeping: generation counter + arrived set
        self._barrier_gen = 0
        self._barrier_arrived: set[int] = set()
        # all-to-all staging table, one row of G blocks per rank
        self._a2a_table: list[Sequence | None] = [None] * size
        self._failure: WorkerFailure | None = None

    # -- failure propagation ------------------------------------------------

    def _fail(self, rank: int, cause: BaseException) -> None:
        with self._cond:
            if self._failure is None:
                self._failure = WorkerFailure(rank, cause)
            self._cond.notify_all()

    def _check_alive(self) -> None:
        if self._failure is not None:
            raise TransportError(
                f"group cancelled: {self._failure}") from self._failure

    # -- point-to-point -----------------------------------------------------

    def _send(self, src: int, dst: int, tag: int, payload: Any) -> None:
        if not 0 <= dst < self.size:
            raise TransportError(f"send: destination rank {dst} out of range")
        if dst == src:
            raise TransportError(f"send: rank {src} cannot send to itself")
        key = (src, dst, tag)
        with self._cond:
            q = self._channels.setdefault(key, deque())
            while len(q) >= self.channel_capacity:
                self._check_alive()
                if not self._cond.wait(self.timeout):
                    raise DeadlockError(
                        f"send timeout: rank {src} -> rank {dst} tag {tag} "
                        f"(channel full, receiver absent)")
            self._check_alive()
            q.append(payload)
            self._cond.notify_all()

    def _receive(self, dst: int, src: int, tag: int) -> Any:
        if not 0 <= src < self.size:
            raise TransportError(f"receive: source rank {src} out of range")
        key = (src, dst, tag)
        with self._cond:
            while True:
                self._check_alive()
                q = self._channels.get(key)
                if q:
                    payload = q.popleft()
                    self._cond.notify_all()
                    return payload
                if not self._cond.wait(self.timeout):
                    raise DeadlockError(
                        f"receive timeout: rank {dst} waiting on "
                        f"src={src} tag={tag}")

    # -- collectives ----------------------------------------------------------

    def _barrier(self, rank: int) -> None:
        with self._cond:
            gen = self._barrier_gen
            self._barrier_arrived.add(rank)
            if len(self._barrier_arrived) == self.size:
                self._barrier_arrived.clear()
                self._barrier_gen += 1
                self._cond.notify_all()
                return
            while self._barrier_gen == gen:
                self._check_alive()
                if not self._cond.wait(self.timeout):
                    absent = sorted(set(range(self.size))
                                    - self._barrier_arrived)
                    raise DeadlockError(
                        f"barrier timeout at generation {gen}: "
                        f"absent ranks {absent}")
            self._check_alive()

    def _all_to_all(self, rank: int, blocks: Sequence) -> list:
        if len(blocks) != self.size:
            err = TransportError(
                f"all_to_all: rank {rank} supplied {len(blocks)} blocks, "
                f"expected {self.size}")
            self._fail(rank, err)
            raise err
        self._a2a_table[rank] = blocks
        self._barrier(rank)
        out = [self._a2a_table[g][rank] for g in range(self.size)]  # type: ignore[index]
        self._barrier(rank)
        return out


class Worker:
    """Per-rank handle passed to the worker body."""

    def __init__(self, group: WorkerGroup, rank: int):
        self.group = group
        self.rank = rank
        self.meter = None  # optional field-memory meter, set by bench

    @property
    def size(self) -> int:
        return self.group.size

    def send(self, dst: int, tag: int, payload: Any) -> None:
        self.group._send(self.rank, dst, tag, payload)

    def receive(self, src: int, tag: int) -> Any:
        return self.group._receive(self.rank, src, tag)

    def all_to_all(self, blocks: Sequence) -> list:
        return self.group._all_to_all(self.rank, blocks)

    def barrier(self) -> None:
        self.group._barrier(self.rank)


def spawn_group(size: int, body: Callable[[Worker], Any],
                timeout: float = DEFAULT_TIMEOUT) -> list:
    """Run ``body(worker)`` on ``size`` workers; return per-rank results.

    The first worker failure cancels the group and is re-raised with rank
    attribution; transport timeouts surface as :class:`DeadlockError`.
    """
    group = WorkerGroup(size, timeout=timeout)
    workers = [Worker(group, r) for r in range(size)]
    results: list = [None] * size

    def runner(w: Worker) -> None:
        try:
            results[w.rank] = body(w)
        except BaseException as exc:  # noqa: BLE001 - must cancel the group
            group._fail(w.rank, exc)

    threads = [threading.Thread(target=runner, args=(w,),
                                name=f"worker-{w.rank}", daemon=True)
               for w in workers]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    if group._failure is not None:
        raise group._failure
    return results
