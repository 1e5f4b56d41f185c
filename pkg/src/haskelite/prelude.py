"""The bundled standard library, written in the interpreted subset.

Being interpreted rather than built in means every use of a library
function shows up in traces justified by its own source equation.
"""

from __future__ import annotations

PRELUDE_SOURCE = """\
id x = x

const x y = x

otherwise = True

not True = False
not False = True

(&&) True x = x
(&&) False x = False

(||) True x = True
(||) False x = x

fst (x, y) = x

snd (x, y) = y

head (x:_) = x

tail (_:xs) = xs

length [] = 0
length (_:xs) = 1 + length xs

(++) [] ys = ys
(++) (x:xs) ys = x : (xs ++ ys)

map f [] = []
map f (x:xs) = f x : map f xs

filter p [] = []
filter p (x:xs) | p x = x : filter p xs
                | otherwise = filter p xs

foldr f z [] = z
foldr f z (x:xs) = f x (foldr f z xs)

foldl f z [] = z
foldl f z (x:xs) = foldl f (f z x) xs

foldl' f z [] = z
foldl' f !z (x:xs) = foldl' f (f z x) xs

zipWith f (x:xs) (y:ys) = f x y : zipWith f xs ys
zipWith f xs ys = []

take n [] = []
take n (x:xs) | n <= 0 = []
              | otherwise = x : take (n - 1) xs

drop n [] = []
drop n (x:xs) | n <= 0 = x:xs
              | otherwise = drop (n - 1) xs

replicate n x | n <= 0 = []
              | otherwise = x : replicate (n - 1) x

iterate f x = x : iterate f (f x)
"""
