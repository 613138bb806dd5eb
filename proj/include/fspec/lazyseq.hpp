#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

namespace fspec {

/// A purely functional, memoized lazy sequence: forcing yields either
/// end-of-sequence or a (head, tail) cell. Cells are computed at most once;
/// re-consuming a sequence yields the identical contents. Nodes are
/// individually locked, so distinct threads may consume their own cursors
/// over a shared sequence.
template <typename T>
class Seq {
 public:
  struct Cell {
    T head;
    Seq<T> tail;
  };

  Seq() = default;  // empty sequence

  static Seq empty() { return Seq(); }

  static Seq cons(T head, Seq tail) {
    auto n = std::make_shared<Node>();
    n->state = State::Cell;
    n->cell.emplace(Cell{std::move(head), std::move(tail)});
    return Seq(std::move(n));
  }

  static Seq single(T v) { return cons(std::move(v), empty()); }

  /// Defers to `make`, which produces the real sequence on first demand.
  static Seq lazy(std::function<Seq<T>()> make) {
    auto n = std::make_shared<Node>();
    n->state = State::Lazy;
    n->make = std::move(make);
    return Seq(std::move(n));
  }

  static Seq fromVector(std::shared_ptr<const std::vector<T>> vec, size_t from = 0) {
    if (!vec || from >= vec->size()) return empty();
    return lazy([vec, from] { return cons((*vec)[from], fromVector(vec, from + 1)); });
  }

  static Seq append(Seq a, Seq b) {
    if (!b.node_) return a;
    return lazy([a, b] {
      const Cell* c = a.force();
      if (!c) return b;
      return cons(c->head, append(c->tail, b));
    });
  }

  /// Forces the first cell. Returns nullptr at end of sequence. The pointer
  /// stays valid for the lifetime of this sequence (it aliases this
  /// sequence's own memoized cell).
  const Cell* force() const {
    if (!node_) return nullptr;
    std::vector<std::shared_ptr<Node>> chain;
    std::shared_ptr<Node> cur = node_;
    std::shared_ptr<Node> finalNode;
    bool exhausted = false;
    while (true) {
      std::unique_lock<std::mutex> lock(cur->mu);
      if (cur->state == State::Lazy) {
        auto make = std::move(cur->make);
        cur->make = nullptr;
        Seq next = make();  // no cycles by construction, so no deadlock
        cur->state = State::Redirect;
        cur->redirect = std::move(next);
      }
      if (cur->state == State::Redirect) {
        std::shared_ptr<Node> next = cur->redirect.node_;
        lock.unlock();
        chain.push_back(std::move(cur));
        if (!next) {
          exhausted = true;
          break;
        }
        cur = std::move(next);
        continue;
      }
      if (cur->state == State::Cell) {
        finalNode = cur;
      } else {
        exhausted = true;
      }
      break;
    }
    for (auto& n : chain) {
      std::unique_lock<std::mutex> lock(n->mu);
      if (n->state != State::Redirect) continue;
      if (exhausted) {
        n->state = State::Empty;
      } else {
        n->cell.emplace(*finalNode->cell);
        n->state = State::Cell;
      }
      n->redirect = Seq();
    }
    // node_ is now memoized (it was either final or the head of the chain)
    std::unique_lock<std::mutex> lock(node_->mu);
    return node_->state == State::Cell ? &*node_->cell : nullptr;
  }

  bool isEmpty() const { return force() == nullptr; }

 private:
  enum class State { Lazy, Cell, Empty, Redirect };

  struct Node {
    std::mutex mu;
    State state = State::Empty;
    std::function<Seq<T>()> make;
    std::optional<Cell> cell;
    Seq<T> redirect;
  };

  explicit Seq(std::shared_ptr<Node> n) : node_(std::move(n)) {}

  std::shared_ptr<Node> node_;
};

template <typename T, typename F>
auto mapSeq(Seq<T> s, F f) -> Seq<decltype(f(std::declval<const T&>()))> {
  using U = decltype(f(std::declval<const T&>()));
  return Seq<U>::lazy([s, f] {
    const typename Seq<T>::Cell* c = s.force();
    if (!c) return Seq<U>::empty();
    return Seq<U>::cons(f(c->head), mapSeq(c->tail, f));
  });
}

template <typename T, typename F>
auto flatMapSeq(Seq<T> s, F f) -> decltype(f(std::declval<const T&>())) {
  using SU = decltype(f(std::declval<const T&>()));
  return SU::lazy([s, f] {
    const typename Seq<T>::Cell* c = s.force();
    if (!c) return SU::empty();
    return SU::append(f(c->head), flatMapSeq(c->tail, f));
  });
}

template <typename T>
std::vector<T> toVector(Seq<T> s) {
  std::vector<T> out;
  for (const auto* c = s.force(); c; c = c->tail.force()) out.push_back(c->head);
  return out;
}

template <typename T>
uint64_t seqLength(Seq<T> s) {
  uint64_t n = 0;
  for (const auto* c = s.force(); c; c = c->tail.force()) ++n;
  return n;
}

}  // namespace fspec
