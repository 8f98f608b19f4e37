; oracle-bounds: x=-1..12,y=-1..12
; (x, y) moves from (0, 0) to (10, 10) along the diagonal. Intervals alone
; admit off-diagonal successors; with x = y confirmed they do not.
(ts
  (state (x Int) (y Int))
  (init (and (= x 0) (= y 0)))
  (trans (and
    (= x' (ite (< x 10) (+ x 1) x))
    (= y' (ite (< y 10) (+ y 1) y)))))
