"""Addressable min-priority queues with decrease-key and pop-all-minimal.

Keys are plain numbers compared with ``<``.  Two implementations share one
interface: a pairing heap (amortized O(1) insert and decrease-key) and a
lazy-deletion binary heap built on :mod:`heapq`.
"""

from __future__ import annotations

import heapq
import itertools


class _Node:
    __slots__ = ("key", "item", "child", "sibling", "prev")

    def __init__(self, key, item):
        self.key = key
        self.item = item
        self.child = None
        self.sibling = None
        self.prev = None  # parent if leftmost child, else left sibling


def _link(a: _Node, b: _Node) -> _Node:
    """Make the larger root the leftmost child of the smaller one."""
    if b.key < a.key:
        a, b = b, a
    b.prev = a
    b.sibling = a.child
    if a.child is not None:
        a.child.prev = b
    a.child = b
    a.sibling = None
    a.prev = None
    return a


class PairingHeap:
    def __init__(self):
        self._root = None
        self._nodes = {}

    def __len__(self):
        return len(self._nodes)

    def __contains__(self, item):
        return item in self._nodes

    def key_of(self, item):
        return self._nodes[item].key

    def insert(self, item, key):
        if item in self._nodes:
            raise KeyError(f"{item!r} already queued")
        node = _Node(key, item)
        self._nodes[item] = node
        self._root = node if self._root is None else _link(self._root, node)

    def decrease(self, item, key):
        node = self._nodes[item]
        if node.key < key:
            raise ValueError("priorities may only decrease")
        node.key = key
        if node is self._root:
            return
        self._detach(node)
        self._root = _link(self._root, node)

    def push_or_decrease(self, item, key):
        node = self._nodes.get(item)
        if node is None:
            self.insert(item, key)
        elif key < node.key:
            self.decrease(item, key)

    def _detach(self, node):
        prev = node.prev
        if prev.child is node:
            prev.child = node.sibling
        else:
            prev.sibling = node.sibling
        if node.sibling is not None:
            node.sibling.prev = prev
        node.prev = None
        node.sibling = None

    def peek_min(self):
        if self._root is None:
            raise IndexError("peek from an empty heap")
        return self._root.key, self._root.item

    def pop_min(self):
        root = self._root
        if root is None:
            raise IndexError("pop from an empty heap")
        del self._nodes[root.item]
        self._root = self._merge_pairs(root.child)
        return root.key, root.item

    @staticmethod
    def _merge_pairs(first):
        """Two-pass pairing: link siblings left to right in pairs, then fold right to left."""
        if first is None:
            return None
        pairs = []
        node = first
        while node is not None:
            a = node
            b = a.sibling
            a.prev = a.sibling = None
            if b is None:
                pairs.append(a)
                break
            node = b.sibling
            b.prev = b.sibling = None
            if b.key < a.key:
                a, b = b, a
            b.prev = a
            b.sibling = a.child
            if a.child is not None:
                a.child.prev = b
            a.child = b
            pairs.append(a)
        root = pairs.pop()
        while pairs:
            a = pairs.pop()
            if root.key < a.key:
                a, root = root, a
            root.prev = a
            root.sibling = a.child
            if a.child is not None:
                a.child.prev = root
            a.child = root
            root = a
        return root

    def pop_all_min(self, eps=0):
        """Remove every entry whose key is within ``eps`` of the minimum."""
        key, item = self.pop_min()
        items = [item]
        while self._root is not None and _tied(self._root.key, key, eps):
            items.append(self.pop_min()[1])
        return key, items


def _tied(k, m, eps):
    return k == m or (eps and k - m <= eps)


class LazyBinaryHeap:
    """heapq with stale entries skipped on pop."""

    def __init__(self):
        self._heap = []
        self._keys = {}
        self._count = itertools.count()

    def __len__(self):
        return len(self._keys)

    def __contains__(self, item):
        return item in self._keys

    def key_of(self, item):
        return self._keys[item]

    def insert(self, item, key):
        if item in self._keys:
            raise KeyError(f"{item!r} already queued")
        self._keys[item] = key
        heapq.heappush(self._heap, (key, next(self._count), item))

    def decrease(self, item, key):
        if self._keys[item] < key:
            raise ValueError("priorities may only decrease")
        self._keys[item] = key
        heapq.heappush(self._heap, (key, next(self._count), item))

    def push_or_decrease(self, item, key):
        old = self._keys.get(item)
        if old is None:
            self.insert(item, key)
        elif key < old:
            self.decrease(item, key)

    def _clean(self):
        h = self._heap
        while h and self._keys.get(h[0][2], _MISSING) != h[0][0]:
            heapq.heappop(h)

    def peek_min(self):
        self._clean()
        if not self._heap:
            raise IndexError("peek from an empty heap")
        key, _, item = self._heap[0]
        return key, item

    def pop_min(self):
        self._clean()
        if not self._heap:
            raise IndexError("pop from an empty heap")
        key, _, item = heapq.heappop(self._heap)
        del self._keys[item]
        return key, item

    def pop_all_min(self, eps=0):
        key, item = self.pop_min()
        items = [item]
        while True:
            self._clean()
            if not self._heap or not _tied(self._heap[0][0], key, eps):
                break
            items.append(self.pop_min()[1])
        return key, items


_MISSING = object()

QUEUES = {"fib": PairingHeap, "pairing": PairingHeap, "binary": LazyBinaryHeap}


def make_queue(kind: str = "fib"):
    try:
        return QUEUES[kind]()
    except KeyError:
        raise ValueError(f"unknown queue {kind!r}; choose from {sorted(QUEUES)}") from None
