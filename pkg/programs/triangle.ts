; oracle-bounds: x=-1..6,y=-1..6
; x and y grow together; a reset drops x to zero, so x <= y always.
(ts
  (input (inc Bool) (rx Bool))
  (state (x Int) (y Int))
  (init (and (= x 0) (= y 0)))
  (trans (and
    (= y' (ite (and inc' (< y 5)) (+ y 1) y))
    (= x' (ite rx' 0 (ite (and inc' (< y 5)) (+ x 1) x))))))
