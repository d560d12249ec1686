// package: lodash
// symbols: merge
const _ = require('lodash');
let m = _.merge;
m = safeMerge;
m(a, b);
var k = _.merge;
k++;
k(a);
