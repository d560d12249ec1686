// package: lodash
// symbols: merge
const _ = require('lodash');
_.mergeWith(a, b, fn);
_.map(list, x => x);
_.merges();
_.Merge();
