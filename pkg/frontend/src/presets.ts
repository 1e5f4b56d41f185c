/** Bundled example programs mirroring the classic traces. */

export interface Preset {
  name: string
  program: string
  expr: string
}

const INSERT = `insert x [] = [x]
insert x (y:ys) | x<=y = x:y:ys
                | otherwise = y:insert x ys
`

export const PRESETS: Preset[] = [
  {
    name: 'insert',
    program: INSERT,
    expr: 'insert 3 [1,2,4]',
  },
  {
    name: 'isort (lazy head)',
    program: INSERT + '\nisort = foldr insert []\n',
    expr: 'head (isort [3,2,1])',
  },
  {
    name: 'foldl',
    program: '',
    expr: 'foldl (*) 1 [2,3,4]',
  },
  {
    name: "foldl' (strict)",
    program: '',
    expr: "foldl' (*) 1 [2,3,4]",
  },
  {
    name: 'sumcount (lazy pairs)',
    program: "sumcount = foldl' step (0,0)\nstep (n,s) x = (1+n,x+s)\n",
    expr: 'sumcount [1,2,3]',
  },
  {
    name: 'sumcount (bang pairs)',
    program: "sumcount = foldl' step (0,0)\nstep (!n,!s) x = (1+n,x+s)\n",
    expr: 'sumcount [1,2,3]',
  },
]
