"""List and control utilities written in Prolog, loaded into every knowledge base."""

from __future__ import annotations

PRELUDE = r"""
append([], L, L).
append([H|T], L, [H|R]) :- append(T, L, R).

append(ListOfLists, List) :- foldl_app_(ListOfLists, List).
foldl_app_([], []).
foldl_app_([L|Ls], As) :- append(L, Ws, As), foldl_app_(Ls, Ws).

member(X, [X|_]).
member(X, [_|T]) :- member(X, T).

memberchk(X, L) :- member(X, L), !.

reverse(L, R) :- reverse_(L, [], R).
reverse_([], A, A).
reverse_([H|T], A, R) :- reverse_(T, [H|A], R).

nth0(I, L, E) :- integer(I), !, I >= 0, nth_det_(I, L, E).
nth0(I, L, E) :- var(I), nth_gen_(L, E, 0, I).
nth1(I, L, E) :- integer(I), !, I >= 1, I0 is I - 1, nth_det_(I0, L, E).
nth1(I, L, E) :- var(I), nth_gen_(L, E, 1, I).
nth_det_(0, [E|_], E) :- !.
nth_det_(I, [_|T], E) :- I1 is I - 1, nth_det_(I1, T, E).
nth_gen_([E|_], E, B, B).
nth_gen_([_|T], E, B0, B) :- B1 is B0 + 1, nth_gen_(T, E, B1, B).

last([X], X) :- !.
last([_|T], X) :- last(T, X).

once(G) :- call(G), !.
ignore(G) :- (call(G) -> true ; true).

maplist(_, []).
maplist(G, [A|As]) :- call(G, A), maplist(G, As).
maplist(_, [], []).
maplist(G, [A|As], [B|Bs]) :- call(G, A, B), maplist(G, As, Bs).
maplist(_, [], [], []).
maplist(G, [A|As], [B|Bs], [C|Cs]) :- call(G, A, B, C), maplist(G, As, Bs, Cs).
maplist(_, [], [], [], []).
maplist(G, [A|As], [B|Bs], [C|Cs], [D|Ds]) :- call(G, A, B, C, D), maplist(G, As, Bs, Cs, Ds).

include(_, [], []).
include(P, [X|Xs], R) :- ( call(P, X) -> R = [X|R1] ; R = R1 ), include(P, Xs, R1).
exclude(_, [], []).
exclude(P, [X|Xs], R) :- ( call(P, X) -> R = R1 ; R = [X|R1] ), exclude(P, Xs, R1).
partition(_, [], [], []).
partition(P, [X|Xs], I, E) :-
    ( call(P, X) -> I = [X|I1], E = E1 ; I = I1, E = [X|E1] ),
    partition(P, Xs, I1, E1).

foldl(G, L, V0, V) :- foldl_(L, G, V0, V).
foldl_([], _, V, V).
foldl_([X|Xs], G, V0, V) :- call(G, X, V0, V1), foldl_(Xs, G, V1, V).

select(X, [X|T], T).
select(X, [H|T], [H|R]) :- select(X, T, R).
selectchk(X, L, R) :- select(X, L, R), !.

exclude_eq_([], _, []).
exclude_eq_([H|T], X, R) :- ( H == X -> R = R1 ; R = [H|R1] ), exclude_eq_(T, X, R1).
delete(L, X, R) :- exclude_eq_(L, X, R).

subtract([], _, []).
subtract([H|T], L, R) :- ( memberchk(H, L) -> R = R1 ; R = [H|R1] ), subtract(T, L, R1).
intersection([], _, []).
intersection([H|T], L, R) :- ( memberchk(H, L) -> R = [H|R1] ; R = R1 ), intersection(T, L, R1).
union([], L, L).
union([H|T], L, R) :- ( memberchk(H, L) -> R = R1 ; R = [H|R1] ), union(T, L, R1).

list_to_set(L, S) :- lts_(L, [], S).
lts_([], _, []).
lts_([H|T], Seen, R) :- ( memberchk_eq_(H, Seen) -> R = R1 ; R = [H|R1] ), lts_(T, [H|Seen], R1).
memberchk_eq_(X, [Y|T]) :- ( X == Y -> true ; memberchk_eq_(X, T) ).

pairs_keys_values([], [], []).
pairs_keys_values([K-V|T], [K|Ks], [V|Vs]) :- pairs_keys_values(T, Ks, Vs).
pairs_keys([], []).
pairs_keys([K-_|T], [K|Ks]) :- pairs_keys(T, Ks).
pairs_values([], []).
pairs_values([_-V|T], [V|Vs]) :- pairs_values(T, Vs).

max_member(M, L) :- msort(L, S), last(S, M).
min_member(M, [H|T]) :- msort([H|T], [M|_]).

permutation([], []).
permutation(L, [H|T]) :- select(H, L, R), permutation(R, T).

concat_atom(L, R) :- atomic_list_concat(L, R).
concat_atom(L, Sep, R) :- atomic_list_concat(L, Sep, R).
"""


def load_prelude(kb) -> None:
    from .kb import parse_program

    for item in parse_program(PRELUDE, "builtin", kb.ops):
        kb.assert_clause(item)
