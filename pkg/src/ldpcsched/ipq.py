"""Indexed binary min-heap with arbitrary key updates.

Keys compare as (key, id) so equal keys pop in id order, which keeps every
scheduler deterministic. Increase-key is supported on purpose: posterior
updates can push a check's error probability up as well as down, so an
amortized-O(1) decrease-key-only structure would not be sound here.
``sift_ops`` counts individual sift steps for the complexity tests.
"""

from __future__ import annotations

import math


class IndexedMinQueue:
    __slots__ = ("capacity", "_heap", "_pos", "sift_ops")

    def __init__(self, capacity: int) -> None:
        if capacity < 1:
            raise ValueError("capacity must be positive")
        self.capacity = capacity
        self._heap: list[tuple[float, int]] = []
        self._pos: list[int] = [-1] * capacity  # id -> heap slot, -1 if absent
        self.sift_ops = 0

    def __len__(self) -> int:
        return len(self._heap)

    def __contains__(self, item: int) -> bool:
        return 0 <= item < self.capacity and self._pos[item] != -1

    @staticmethod
    def _check_key(key: float) -> float:
        key = float(key)
        if math.isnan(key):
            raise ValueError("NaN keys are not allowed")
        return key

    def insert(self, item: int, key: float) -> None:
        if not 0 <= item < self.capacity:
            raise IndexError(f"id {item} out of range for capacity {self.capacity}")
        if self._pos[item] != -1:
            raise ValueError(f"id {item} is already in the queue")
        key = self._check_key(key)
        self._heap.append((key, item))
        self._pos[item] = len(self._heap) - 1
        self._sift_up(len(self._heap) - 1)

    def peek_min(self) -> tuple[int, float]:
        if not self._heap:
            raise IndexError("peek on empty queue")
        key, item = self._heap[0]
        return item, key

    def pop_min(self) -> tuple[int, float]:
        if not self._heap:
            raise IndexError("pop on empty queue")
        key, item = self._heap[0]
        self._pos[item] = -1
        last = self._heap.pop()
        if self._heap:
            self._heap[0] = last
            self._pos[last[1]] = 0
            self._sift_down(0)
        return item, key

    def update_key(self, item: int, key: float) -> None:
        slot = self._pos[item] if 0 <= item < self.capacity else -1
        if slot == -1:
            raise KeyError(f"id {item} is not in the queue")
        key = self._check_key(key)
        old = self._heap[slot]
        entry = (key, item)
        if entry == old:
            return
        self._heap[slot] = entry
        if entry < old:
            self._sift_up(slot)
        else:
            self._sift_down(slot)

    def _sift_up(self, slot: int) -> None:
        heap, pos = self._heap, self._pos
        entry = heap[slot]
        while slot > 0:
            parent = (slot - 1) >> 1
            if heap[parent] <= entry:
                break
            heap[slot] = heap[parent]
            pos[heap[slot][1]] = slot
            slot = parent
            self.sift_ops += 1
        heap[slot] = entry
        pos[entry[1]] = slot

    def _sift_down(self, slot: int) -> None:
        heap, pos = self._heap, self._pos
        n = len(heap)
        entry = heap[slot]
        while True:
            child = 2 * slot + 1
            if child >= n:
                break
            right = child + 1
            if right < n and heap[right] < heap[child]:
                child = right
            if entry <= heap[child]:
                break
            heap[slot] = heap[child]
            pos[heap[slot][1]] = slot
            slot = child
            self.sift_ops += 1
        heap[slot] = entry
        pos[entry[1]] = slot
