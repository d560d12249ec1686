// package: lodash
// symbols: merge
const _ = require('lodash');
// _.merge(a, b);
/* _.merge(a, b); */
const doc = "_.merge(a, b)";
const tpl = `_.merge(${a}, b)`;
const re = /_.merge\(a\)/;
